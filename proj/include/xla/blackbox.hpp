#pragma once

#include <concepts>
#include <cstddef>
#include <vector>

#include "xla/dense.hpp"
#include "xla/sparse.hpp"

namespace xla {

// Anything known through its dimensions and its apply action.
template <class A>
concept Blackbox = requires(const A& a, MatrixView y, ConstMatrixView x, Side side, Element s) {
    { a.rows() } -> std::convertible_to<std::size_t>;
    { a.cols() } -> std::convertible_to<std::size_t>;
    a.apply(y, x, side, s, s);
};

class Diagonal {
public:
    Diagonal(const PrimeField& field, std::vector<Element> diag);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return diag_.size(); }
    std::size_t cols() const noexcept { return diag_.size(); }
    const std::vector<Element>& diagonal() const noexcept { return diag_; }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

private:
    PrimeField field_;
    std::vector<Element> diag_;
};

SparseCSR to_csr(const Diagonal& d);

// The product A*B as a blackbox; holds references, so A and B must outlive it.
template <Blackbox Outer, Blackbox Inner>
class Compose {
public:
    Compose(const Outer& a, const Inner& b) : a_(a), b_(b) {
        if (a.cols() != b.rows()) throw DimensionError("Compose: inner dimensions disagree");
    }

    std::size_t rows() const noexcept { return a_.rows(); }
    std::size_t cols() const noexcept { return b_.cols(); }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const {
        check_apply_shape(rows(), cols(), y, x, side, "Compose::apply");
        DenseMatrix tmp(x.field(), a_.cols(), x.cols());
        if (side == Side::Right) {
            b_.apply(tmp, x, Side::Right, 1, 0);
            a_.apply(y, tmp, Side::Right, alpha, beta);
        } else {
            // (AB)^T x = B^T (A^T x)
            a_.apply(tmp, x, Side::Left, 1, 0);
            b_.apply(y, tmp, Side::Left, alpha, beta);
        }
    }

private:
    const Outer& a_;
    const Inner& b_;
};

// Materialize any blackbox by applying it to the identity.
template <Blackbox A>
DenseMatrix blackbox_to_dense(const A& a, const PrimeField& field) {
    DenseMatrix out(field, a.rows(), a.cols());
    const auto id = DenseMatrix::identity(field, a.cols());
    a.apply(out, id, Side::Right, 1, 0);
    return out;
}

} // namespace xla
