#pragma once

#include <cstddef>
#include <vector>

#include "xla/dense.hpp"

namespace xla {

/**
 * Permutation stored as a LAPACK-style pivot array: ipiv[i] (1-based) is the
 * row swapped with row i+1, swaps applied in increasing i. The matrix P is the
 * result of applying those swaps to the identity, so row i of P*A is row
 * image(i) of A.
 *
 * Cycles are 1-based lists (c0 c1 ... ck) meaning c0 -> c1 -> ... -> c0 under
 * image(), i.e. row c0 of P*A is row c1 of A.
 */
class Permutation {
public:
    explicit Permutation(std::size_t n);
    explicit Permutation(std::vector<std::size_t> ipiv);

    static Permutation from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles);
    // ipiv produced by a greedy scan, so that ipiv[i] >= i+1 always holds.
    static Permutation from_images(const std::vector<std::size_t>& images);

    std::size_t size() const noexcept { return ipiv_.size(); }
    std::size_t rows() const noexcept { return size(); }
    std::size_t cols() const noexcept { return size(); }
    const std::vector<std::size_t>& ipiv() const noexcept { return ipiv_; }

    // 0-based: row i of P*A is row images()[i] of A.
    std::vector<std::size_t> images() const;
    // Non-trivial cycles only, each starting at its smallest element, sorted.
    std::vector<std::vector<std::size_t>> cycles() const;

    // A <- P*A (Left) or A <- A*P (Right).
    void permute(MatrixView a, Side side) const;

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> ipiv_;
};

inline void perm_apply(const Permutation& p, MatrixView a, Side side) { p.permute(a, side); }

DenseMatrix to_dense(const Permutation& p, const PrimeField& field);

} // namespace xla
