#include "xla/rns.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "xla/errors.hpp"

namespace xla {

RnsBasis::RnsBasis(std::vector<std::uint64_t> primes) : primes_(std::move(primes)) {
    if (primes_.empty()) throw std::invalid_argument("RnsBasis: empty prime list");
    auto sorted = primes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("RnsBasis: primes must be distinct");
    }
    fields_.reserve(primes_.size());
    for (auto q : primes_) fields_.emplace_back(q);

    product_ = 1;
    for (auto q : primes_) product_ *= static_cast<unsigned long>(q);
    half_ = product_ / 2;

    cofactors_.reserve(primes_.size());
    coeffs_.reserve(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        mpz_class cof = product_ / static_cast<unsigned long>(primes_[i]);
        const Element m = mpz_fdiv_ui(cof.get_mpz_t(), primes_[i]);
        coeffs_.push_back(fields_[i].inv(m));
        cofactors_.push_back(std::move(cof));
    }
}

std::vector<Element> RnsBasis::reduce(const mpz_class& x) const {
    std::vector<Element> out(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) out[i] = mpz_fdiv_ui(x.get_mpz_t(), primes_[i]);
    return out;
}

void RnsBasis::reconstruct(std::span<const Element> residues, mpz_class& out) const {
    if (residues.size() != primes_.size()) {
        throw DimensionError("crt_reconstruct: got " + std::to_string(residues.size()) + " residues for a basis of " +
                             std::to_string(primes_.size()) + " primes");
    }
    out = 0;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        const Element t = fields_[i].mul(residues[i] % primes_[i], coeffs_[i]);
        if (t) mpz_addmul_ui(out.get_mpz_t(), cofactors_[i].get_mpz_t(), t);
    }
    mpz_fdiv_r(out.get_mpz_t(), out.get_mpz_t(), product_.get_mpz_t());
    if (out > half_) out -= product_;
}

mpz_class RnsBasis::reconstruct(std::span<const Element> residues) const {
    mpz_class out;
    reconstruct(residues, out);
    return out;
}

RnsBasis rns_build_with_divisor(const mpz_class& bound, unsigned prime_bits, std::uint64_t divisor) {
    if (prime_bits < 2) throw std::invalid_argument("rns_build: prime width must be at least 2 bits");
    if (prime_bits > 32) throw std::invalid_argument("rns_build: primes wider than 32 bits are not word-size");
    if (bound < 1) throw std::invalid_argument("rns_build: bound must be >= 1");
    if (divisor == 0) divisor = 1;

    const mpz_class target = 2 * bound;
    std::vector<std::uint64_t> primes;
    mpz_class product = 1;
    const std::uint64_t top = (std::uint64_t{1} << prime_bits) - 1;
    // Walk down through candidates congruent to 1 modulo the divisor.
    std::uint64_t q = top - (top - 1) % divisor;
    while (product <= target) {
        if (q < 2 || q > top) {
            throw std::invalid_argument("rns_build: not enough " + std::to_string(prime_bits) +
                                        "-bit primes to exceed the requested bound");
        }
        if (is_prime(q)) {
            primes.push_back(q);
            product *= static_cast<unsigned long>(q);
        }
        if (q <= divisor) break;
        q -= divisor;
    }
    if (product <= target) {
        throw std::invalid_argument("rns_build: not enough " + std::to_string(prime_bits) +
                                    "-bit primes to exceed the requested bound");
    }
    return RnsBasis(std::move(primes));
}

RnsBasis rns_build(const mpz_class& bound, unsigned prime_bits) {
    return rns_build_with_divisor(bound, prime_bits, 1);
}

} // namespace xla
