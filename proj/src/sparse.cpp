#include "xla/sparse.hpp"

#include <algorithm>
#include <string>

namespace xla {

SparseCOO::SparseCOO(const PrimeField& field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols) {}

SparseCOO SparseCOO::from_triplets(const PrimeField& field, std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw std::out_of_range("SparseCOO: entry (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                    ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseCOO out(field, rows, cols);
    for (std::size_t i = 0; i < entries.size();) {
        Element sum = 0;
        std::size_t j = i;
        for (; j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col; ++j) {
            sum = field.add(sum, field.reduce(entries[j].value));
        }
        if (sum != 0) {
            out.row_.push_back(entries[i].row);
            out.col_.push_back(entries[i].col);
            out.values_.push_back(sum);
        }
        i = j;
    }
    return out;
}

SparseCSR::SparseCSR(const PrimeField& field, std::size_t rows, std::size_t cols)
    : field_(field), rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseCSR::SparseCSR(const PrimeField& field, std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<Element> values)
    : field_(field),
      rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size()) {
        throw std::invalid_argument("SparseCSR: inconsistent row_ptr / col_idx / values sizes");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw std::invalid_argument("SparseCSR: row_ptr decreases");
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            if (col_idx_[e] >= cols_) throw std::out_of_range("SparseCSR: column index out of range");
            if (e > row_ptr_[i] && col_idx_[e] <= col_idx_[e - 1]) {
                throw std::invalid_argument("SparseCSR: column indices not strictly increasing in row " +
                                            std::to_string(i));
            }
            if (values_[e] == 0 || !field_.is_canonical(values_[e])) {
                throw std::invalid_argument("SparseCSR: stored zero or non-canonical value");
            }
        }
    }
}

SparseCSR to_csr(const SparseCSR& a) { return a; }

SparseCSR to_csr(const SparseCOO& a) {
    std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
    for (auto r : a.row_indices()) ++row_ptr[r + 1];
    for (std::size_t i = 0; i < a.rows(); ++i) row_ptr[i + 1] += row_ptr[i];
    // COO is already row-major sorted.
    return SparseCSR(a.field(), a.rows(), a.cols(), std::move(row_ptr), a.col_indices(), a.values());
}

SparseCSR to_csr(ConstMatrixView a) {
    std::vector<std::size_t> row_ptr{0}, cols;
    std::vector<Element> vals;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (a(i, j) != 0) {
                cols.push_back(j);
                vals.push_back(a(i, j));
            }
        }
        row_ptr.push_back(vals.size());
    }
    return SparseCSR(a.field(), a.rows(), a.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseCSR transpose(const SparseCSR& a) {
    std::vector<std::size_t> row_ptr(a.cols() + 1, 0);
    for (auto c : a.col_idx()) ++row_ptr[c + 1];
    for (std::size_t j = 0; j < a.cols(); ++j) row_ptr[j + 1] += row_ptr[j];
    std::vector<std::size_t> next(row_ptr.begin(), row_ptr.end() - 1);
    std::vector<std::size_t> cols(a.nnz());
    std::vector<Element> vals(a.nnz());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t e = a.row_ptr()[i]; e < a.row_ptr()[i + 1]; ++e) {
            const std::size_t dst = next[a.col_idx()[e]]++;
            cols[dst] = i;
            vals[dst] = a.values()[e];
        }
    }
    return SparseCSR(a.field(), a.cols(), a.rows(), std::move(row_ptr), std::move(cols), std::move(vals));
}

template <>
SparseCSR from_csr<SparseCSR>(const SparseCSR& s) {
    return s;
}

template <>
SparseCOO from_csr<SparseCOO>(const SparseCSR& s) {
    std::vector<Triplet> entries;
    entries.reserve(s.nnz());
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t e = s.row_ptr()[i]; e < s.row_ptr()[i + 1]; ++e) {
            entries.push_back({i, s.col_idx()[e], s.values()[e]});
        }
    }
    return SparseCOO::from_triplets(s.field(), s.rows(), s.cols(), std::move(entries));
}

template <>
DenseMatrix from_csr<DenseMatrix>(const SparseCSR& s) {
    DenseMatrix d(s.field(), s.rows(), s.cols());
    for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t e = s.row_ptr()[i]; e < s.row_ptr()[i + 1]; ++e) d(i, s.col_idx()[e]) = s.values()[e];
    }
    return d;
}

SparseCOO rebind(const SparseCOO& a, const PrimeField& target) {
    std::vector<Triplet> entries;
    entries.reserve(a.nnz());
    for (std::size_t e = 0; e < a.nnz(); ++e) {
        entries.push_back({a.row_indices()[e], a.col_indices()[e], target.reduce(a.values()[e])});
    }
    return SparseCOO::from_triplets(target, a.rows(), a.cols(), std::move(entries));
}

SparseCSR rebind(const SparseCSR& a, const PrimeField& target) {
    return to_csr(rebind(from_csr<SparseCOO>(a), target));
}

} // namespace xla
