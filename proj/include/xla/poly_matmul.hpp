#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xla/dense.hpp"
#include "xla/matmul.hpp"

namespace xla {

class NoRootError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Matrix with polynomial entries, stored as one m x n coefficient matrix per
// power of x. degree() is a storage bound; leading coefficients may be zero.
class PolyMatrix {
public:
    PolyMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::size_t degree);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    DenseMatrix& coeff(std::size_t power) { return coeffs_.at(power); }
    const DenseMatrix& coeff(std::size_t power) const { return coeffs_.at(power); }

    friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
        return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.coeffs_ == b.coeffs_;
    }

private:
    PrimeField field_;
    std::size_t rows_, cols_;
    std::vector<DenseMatrix> coeffs_;
};

// An element of exact multiplicative order n (n a power of two dividing p-1).
// Throws NoRootError when n does not divide p-1.
Element find_root(const PrimeField& field, std::size_t n);

// Radix-2 transform of length n = 2^s: forward computes v[j] = sum_i v[i] w^(ij).
class NttPlan {
public:
    NttPlan(const PrimeField& field, std::size_t n);

    const PrimeField& field() const noexcept { return field_; }
    std::size_t size() const noexcept { return n_; }
    Element root() const noexcept { return root_; }

    void forward(std::span<Element> v) const;
    // Includes the 1/n scaling, so inverse(forward(v)) == v.
    void inverse(std::span<Element> v) const;

private:
    void transform(std::span<Element> v, const std::vector<Element>& twiddles) const;

    PrimeField field_;
    std::size_t n_;
    Element root_;
    Element n_inv_;
    std::vector<Element> fwd_twiddles_, inv_twiddles_;
    std::vector<std::size_t> bitrev_;
};

inline void ntt_forward(std::span<Element> v, const NttPlan& plan) { plan.forward(v); }
inline void ntt_inverse(std::span<Element> v, const NttPlan& plan) { plan.inverse(v); }

// Product of degree dA+dB via evaluation at 2-power roots of unity, pointwise
// products through `mul`, interpolation. Fields without the needed roots go
// through CRT over NTT-friendly primes.
PolyMatrix poly_mul(const PolyMatrix& a, const PolyMatrix& b, const MulHelper& helper = {});

} // namespace xla
