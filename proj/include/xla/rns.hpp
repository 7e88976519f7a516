#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "xla/field.hpp"

namespace xla {

/**
 * Residue number system over pairwise-distinct word-size primes.
 *
 * Reconstruction uses precomputed Lagrange constants: for each prime q_i,
 * M_i = M / q_i and c_i = M_i^{-1} mod q_i, so that
 *   r = sum_i ((res_i * c_i) mod q_i) * M_i  (mod M).
 * The result is returned in the balanced range (-M/2, M/2].
 */
class RnsBasis {
public:
    explicit RnsBasis(std::vector<std::uint64_t> primes);

    const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
    const std::vector<PrimeField>& fields() const noexcept { return fields_; }
    std::size_t size() const noexcept { return primes_.size(); }
    const mpz_class& product() const noexcept { return product_; }
    const std::vector<Element>& crt_coefficients() const noexcept { return coeffs_; }
    const std::vector<mpz_class>& cofactors() const noexcept { return cofactors_; }

    // Residues of x modulo every prime, canonical.
    std::vector<Element> reduce(const mpz_class& x) const;

    // Unique r in (-M/2, M/2] with r = residues[i] mod q_i. Throws DimensionError
    // on a count mismatch.
    mpz_class reconstruct(std::span<const Element> residues) const;
    void reconstruct(std::span<const Element> residues, mpz_class& out) const;

private:
    std::vector<std::uint64_t> primes_;
    std::vector<PrimeField> fields_;
    mpz_class product_;
    mpz_class half_;
    std::vector<mpz_class> cofactors_;
    std::vector<Element> coeffs_;
};

// Minimal basis of the largest primes below 2^prime_bits with M > 2*bound.
RnsBasis rns_build(const mpz_class& bound, unsigned prime_bits = PrimeField::kDefaultPrimeBits);

// Same, restricted to primes q with divisor | q-1 (e.g. NTT-friendly primes).
RnsBasis rns_build_with_divisor(const mpz_class& bound, unsigned prime_bits, std::uint64_t divisor);

inline mpz_class crt_reconstruct(std::span<const Element> residues, const RnsBasis& basis) {
    return basis.reconstruct(residues);
}

} // namespace xla
