#include "xla/dense.hpp"

#include <algorithm>
#include <string>

namespace xla {

namespace {

void check_window(std::size_t rows, std::size_t cols, std::size_t r0, std::size_t c0, std::size_t m,
                  std::size_t n) {
    if (r0 > rows || c0 > cols || m > rows - r0 || n > cols - c0) {
        throw std::out_of_range("submatrix: window (" + std::to_string(r0) + "," + std::to_string(c0) + ") of " +
                                std::to_string(m) + "x" + std::to_string(n) + " exceeds " + std::to_string(rows) +
                                "x" + std::to_string(cols));
    }
}

std::string shape(std::size_t m, std::size_t n) { return std::to_string(m) + "x" + std::to_string(n); }

} // namespace

ConstMatrixView ConstMatrixView::submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) const {
    check_window(rows_, cols_, r0, c0, m, n);
    return {field_, data_ + r0 * stride_ + c0, m, n, stride_};
}

MatrixView MatrixView::submatrix(std::size_t r0, std::size_t c0, std::size_t m, std::size_t n) const {
    check_window(rows_, cols_, r0, c0, m, n);
    return {field_, data_ + r0 * stride_ + c0, m, n, stride_};
}

void MatrixView::fill(Element v) const noexcept {
    for (std::size_t i = 0; i < rows_; ++i) std::fill_n(data_ + i * stride_, cols_, v);
}

void MatrixView::copy_from(ConstMatrixView src) const {
    if (src.rows() != rows_ || src.cols() != cols_) {
        throw DimensionError("copy_from: " + shape(src.rows(), src.cols()) + " into " + shape(rows_, cols_));
    }
    for (std::size_t i = 0; i < rows_; ++i) std::copy_n(src.data() + i * src.stride(), cols_, data_ + i * stride_);
}

DenseMatrix::DenseMatrix(const PrimeField& field, std::size_t rows, std::size_t cols)
    : DenseMatrix(field, rows, cols, cols) {}

DenseMatrix::DenseMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::size_t stride)
    : field_(field), rows_(rows), cols_(cols), stride_(std::max<std::size_t>(stride, 1)) {
    if (stride < cols) throw std::invalid_argument("DenseMatrix: stride smaller than column count");
    data_.assign(rows ? (rows - 1) * stride_ + cols : 0, 0);
}

DenseMatrix::DenseMatrix(const PrimeField& field, std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : DenseMatrix(field, rows.size(), rows.size() ? rows.begin()->size() : 0) {
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged initializer");
        std::size_t j = 0;
        for (auto v : r) (*this)(i, j++) = field_.normalize(v);
        ++i;
    }
}

DenseMatrix::DenseMatrix(ConstMatrixView src) : DenseMatrix(src.field(), src.rows(), src.cols()) {
    view().copy_from(src);
}

DenseMatrix DenseMatrix::identity(const PrimeField& field, std::size_t n) {
    DenseMatrix id(field, n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = 1;
    return id;
}

std::size_t DenseMatrix::count_nonzeros() const noexcept {
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) nnz += (*this)(i, j) != 0;
    }
    return nnz;
}

bool equal(ConstMatrixView a, ConstMatrixView b) {
    if (!(a.field() == b.field()) || a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (!std::equal(a.row(i).begin(), a.row(i).end(), b.row(i).begin())) return false;
    }
    return true;
}

bool operator==(const DenseMatrix& a, const DenseMatrix& b) { return equal(a.view(), b.view()); }

DenseMatrix transpose(ConstMatrixView a) {
    DenseMatrix t(a.field(), a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    }
    return t;
}

DenseMatrix rebind(ConstMatrixView a, const PrimeField& target) {
    DenseMatrix out(target, a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = target.reduce(a(i, j));
    }
    return out;
}

DenseVector::DenseVector(const PrimeField& field, std::size_t size, std::size_t increment)
    : field_(field), size_(size), inc_(std::max<std::size_t>(increment, 1)) {
    data_.assign(size ? (size - 1) * inc_ + 1 : 0, 0);
}

DenseVector::DenseVector(const PrimeField& field, std::initializer_list<std::int64_t> values)
    : DenseVector(field, values.size()) {
    std::size_t i = 0;
    for (auto v : values) (*this)[i++] = field_.normalize(v);
}

bool operator==(const DenseVector& a, const DenseVector& b) { return equal(a.view(), b.view()); }

void check_apply_shape(std::size_t rows, std::size_t cols, ConstMatrixView y, ConstMatrixView x, Side side,
                       const char* who) {
    const std::size_t in = side == Side::Right ? cols : rows;
    const std::size_t out = side == Side::Right ? rows : cols;
    if (x.rows() != in || y.rows() != out || x.cols() != y.cols()) {
        throw DimensionError(std::string(who) + ": " + (side == Side::Right ? "right" : "left") + " apply of a " +
                             shape(rows, cols) + " operator needs x " + std::to_string(in) + "xb and y " +
                             std::to_string(out) + "xb, got x " + shape(x.rows(), x.cols()) + " and y " +
                             shape(y.rows(), y.cols()));
    }
    if (!(x.field() == y.field())) throw DimensionError(std::string(who) + ": x and y live in different fields");
}

} // namespace xla
