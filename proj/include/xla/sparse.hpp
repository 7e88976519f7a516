#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "xla/dense.hpp"

namespace xla {

struct Triplet {
    std::size_t row;
    std::size_t col;
    Element value;
};

class SparseCSR;

/**
 * Coordinate storage in canonical form: sorted row-major, no duplicate
 * (row, col) and no stored zeros. Used for reading and interchange.
 */
class SparseCOO {
public:
    SparseCOO(const PrimeField& field, std::size_t rows, std::size_t cols);

    // Sorts, merges duplicates by field addition and drops zeros. Values are
    // reduced into the field first.
    static SparseCOO from_triplets(const PrimeField& field, std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_indices() const noexcept { return row_; }
    const std::vector<std::size_t>& col_indices() const noexcept { return col_; }
    const std::vector<Element>& values() const noexcept { return values_; }

    // Index and value slots held: three per entry.
    std::size_t storage_slots() const noexcept { return 3 * nnz(); }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

    friend bool operator==(const SparseCOO&, const SparseCOO&) = default;

private:
    PrimeField field_;
    std::size_t rows_, cols_;
    std::vector<std::size_t> row_, col_;
    std::vector<Element> values_;
};

// Compressed sparse rows; the hub every other format converts through.
class SparseCSR {
public:
    SparseCSR(const PrimeField& field, std::size_t rows, std::size_t cols);
    // Validates the canonical-form invariants.
    SparseCSR(const PrimeField& field, std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
              std::vector<std::size_t> col_idx, std::vector<Element> values);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
    const std::vector<Element>& values() const noexcept { return values_; }

    // Two slots per entry plus the row offsets.
    std::size_t storage_slots() const noexcept { return 2 * nnz() + rows_ + 1; }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

    friend bool operator==(const SparseCSR&, const SparseCSR&) = default;

private:
    PrimeField field_;
    std::size_t rows_, cols_;
    std::vector<std::size_t> row_ptr_, col_idx_;
    std::vector<Element> values_;
};

SparseCSR to_csr(const SparseCSR& a);
SparseCSR to_csr(const SparseCOO& a);
SparseCSR to_csr(ConstMatrixView a);
inline SparseCSR to_csr(const DenseMatrix& a) { return to_csr(a.view()); }

SparseCSR transpose(const SparseCSR& a);

// from_csr<Target>: the second half of every format conversion.
template <class Target>
Target from_csr(const SparseCSR& s);

template <>
SparseCSR from_csr<SparseCSR>(const SparseCSR& s);
template <>
SparseCOO from_csr<SparseCOO>(const SparseCSR& s);
template <>
DenseMatrix from_csr<DenseMatrix>(const SparseCSR& s);

// Format conversion always goes through CSR.
template <class Target, class Source>
Target convert(const Source& src) {
    return from_csr<Target>(to_csr(src));
}

template <class Source>
DenseMatrix to_dense(const Source& src) {
    return convert<DenseMatrix>(src);
}

SparseCOO rebind(const SparseCOO& a, const PrimeField& target);
SparseCSR rebind(const SparseCSR& a, const PrimeField& target);

} // namespace xla
