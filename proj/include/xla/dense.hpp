#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xla/errors.hpp"
#include "xla/field.hpp"

namespace xla {

// Which product an apply computes: Right is y <- a*A*x + b*y,
// Left is y <- a*A^T*x + b*y.
enum class Side { Right, Left };

class MatrixView;

// Non-owning, read-only window on row-major storage with a row stride.
class ConstMatrixView {
public:
    ConstMatrixView(const PrimeField& field, const Element* data, std::size_t rows, std::size_t cols,
                    std::size_t stride)
        : field_(field), data_(data), rows_(rows), cols_(cols), stride_(stride) {}

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t stride() const noexcept { return stride_; }
    const Element* data() const noexcept { return data_; }

    const Element& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * stride_ + j]; }
    std::span<const Element> row(std::size_t i) const noexcept { return {data_ + i * stride_, cols_}; }

    ConstMatrixView submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) const;
    ConstMatrixView column(std::size_t j) const { return submatrix(0, j, rows_, 1); }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

private:
    PrimeField field_;
    const Element* data_;
    std::size_t rows_, cols_, stride_;
};

// Non-owning, writable window. Never outlives the storage it aliases.
class MatrixView {
public:
    MatrixView(const PrimeField& field, Element* data, std::size_t rows, std::size_t cols, std::size_t stride)
        : field_(field), data_(data), rows_(rows), cols_(cols), stride_(stride) {}

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t stride() const noexcept { return stride_; }
    Element* data() const noexcept { return data_; }

    Element& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * stride_ + j]; }
    std::span<Element> row(std::size_t i) const noexcept { return {data_ + i * stride_, cols_}; }

    MatrixView submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) const;
    MatrixView column(std::size_t j) const { return submatrix(0, j, rows_, 1); }

    operator ConstMatrixView() const noexcept { return {field_, data_, rows_, cols_, stride_}; }

    void fill(Element v) const noexcept;
    void copy_from(ConstMatrixView src) const;

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const {
        ConstMatrixView(*this).apply(y, x, side, alpha, beta);
    }

private:
    PrimeField field_;
    Element* data_;
    std::size_t rows_, cols_, stride_;
};

/**
 * Owning row-major matrix over a prime field.
 *
 * Storage is acquired by the constructor and released by the destructor;
 * views obtained from `view()` or `submatrix()` share it and must not outlive
 * the matrix. Entries are always canonical.
 */
class DenseMatrix {
public:
    DenseMatrix(const PrimeField& field, std::size_t rows, std::size_t cols);
    DenseMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::size_t stride);
    // Rows of signed integers, normalized into the field.
    DenseMatrix(const PrimeField& field, std::initializer_list<std::initializer_list<std::int64_t>> rows);
    explicit DenseMatrix(ConstMatrixView src);

    static DenseMatrix identity(const PrimeField& field, std::size_t n);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t stride() const noexcept { return stride_; }
    Element* data() noexcept { return data_.data(); }
    const Element* data() const noexcept { return data_.data(); }

    Element& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * stride_ + j]; }
    const Element& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * stride_ + j]; }

    MatrixView view() noexcept { return {field_, data_.data(), rows_, cols_, stride_}; }
    ConstMatrixView view() const noexcept { return {field_, data_.data(), rows_, cols_, stride_}; }
    ConstMatrixView cview() const noexcept { return view(); }
    operator MatrixView() noexcept { return view(); }
    operator ConstMatrixView() const noexcept { return view(); }

    MatrixView submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) {
        return view().submatrix(r0, c0, m, n);
    }
    ConstMatrixView submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) const {
        return view().submatrix(r0, c0, m, n);
    }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const {
        view().apply(y, x, side, alpha, beta);
    }

    std::size_t count_nonzeros() const noexcept;

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b);

private:
    PrimeField field_;
    std::size_t rows_, cols_, stride_;
    std::vector<Element> data_;
};

bool equal(ConstMatrixView a, ConstMatrixView b);

DenseMatrix transpose(ConstMatrixView a);

// Lift each canonical entry to [0, p_src) and reduce it into `target`.
DenseMatrix rebind(ConstMatrixView a, const PrimeField& target);

/**
 * Owning vector with an element increment. `view()` exposes it as an n x 1
 * matrix so it can be passed wherever a block of vectors is expected.
 */
class DenseVector {
public:
    DenseVector(const PrimeField& field, std::size_t size, std::size_t increment = 1);
    DenseVector(const PrimeField& field, std::initializer_list<std::int64_t> values);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t increment() const noexcept { return inc_; }

    Element& operator[](std::size_t i) noexcept { return data_[i * inc_]; }
    const Element& operator[](std::size_t i) const noexcept { return data_[i * inc_]; }

    MatrixView view() noexcept { return {field_, data_.data(), size_, 1, inc_}; }
    ConstMatrixView view() const noexcept { return {field_, data_.data(), size_, 1, inc_}; }
    operator MatrixView() noexcept { return view(); }
    operator ConstMatrixView() const noexcept { return view(); }

    MatrixView subvector(std::size_t offset, std::size_t length) { return view().submatrix(offset, 0, length, 1); }

    friend bool operator==(const DenseVector& a, const DenseVector& b);

private:
    PrimeField field_;
    std::size_t size_, inc_;
    std::vector<Element> data_;
};

// Shape check shared by every apply: Right needs x: cols x b, y: rows x b;
// Left needs x: rows x b, y: cols x b.
void check_apply_shape(std::size_t rows, std::size_t cols, ConstMatrixView y, ConstMatrixView x, Side side,
                       const char* who);

} // namespace xla
