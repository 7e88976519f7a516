#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "xla/dense.hpp"
#include "xla/integer_matrix.hpp"
#include "xla/matmul.hpp"
#include "xla/rns.hpp"

namespace xla {

enum class ReductionStrategy { PerEntry, MatrixProduct };

/**
 * |A| split into base-2^digit_bits digits, one row per entry of A (row-major
 * entry order) and one column per digit, least significant first. Signs are
 * kept apart so every digit lies in [0, 2^digit_bits).
 */
struct DigitDecomposition {
    static constexpr unsigned kDigitBits = 16;

    unsigned digit_bits = kDigitBits;
    std::size_t entries = 0;
    std::size_t digits = 0;
    std::vector<std::uint64_t> values; // entries x digits, row-major
    std::vector<bool> negative;        // per entry

    std::uint64_t operator()(std::size_t e, std::size_t j) const noexcept { return values[e * digits + j]; }
};

DigitDecomposition decompose(const IntegerMatrix& a, unsigned digit_bits = DigitDecomposition::kDigitBits);
// Inverse of decompose, for checking.
IntegerMatrix recompose(const DigitDecomposition& d, std::size_t rows, std::size_t cols);

// k * max|A| * max|B|, a bound on every entry of A*B.
mpz_class result_bound(const IntegerMatrix& a, const IntegerMatrix& b);

// Residue matrix per basis prime, canonical entries.
std::vector<DenseMatrix> multimodular_reduce(const IntegerMatrix& a, const RnsBasis& basis,
                                             ReductionStrategy strategy = ReductionStrategy::MatrixProduct);

// Exact A*B: reduce modulo enough primes, multiply each image with `mul`,
// reconstruct entries in the balanced range.
IntegerMatrix mul_crt(const IntegerMatrix& a, const IntegerMatrix& b,
                      ReductionStrategy strategy = ReductionStrategy::MatrixProduct, const MulHelper& helper = {});

} // namespace xla
