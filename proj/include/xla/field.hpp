#pragma once

#include <compare>
#include <cstdint>
#include <limits>

namespace xla {

// Canonical representative of a prime field element, always in [0, p).
using Element = std::uint64_t;

// Deterministic Miller-Rabin, valid for every 64-bit input.
bool is_prime(std::uint64_t n) noexcept;

// Largest k such that (p-1) + k*(p-1)^2 <= capacity, i.e. how many products of
// canonical elements can be added to a canonical value before a reduction is
// required. Throws std::invalid_argument when not even one product fits.
std::uint64_t delayed_bound(std::uint64_t p, std::uint64_t capacity);

/**
 * Z/pZ for a word-size prime p.
 *
 * Elements are stored as canonical integers in [0, p). The field also carries
 * the capacity of the unsigned accumulator used by the kernels and the number
 * of products (`max_accumulation`) that may be summed into it without a
 * modular reduction.
 */
class PrimeField {
public:
    static constexpr std::uint64_t kDefaultCapacity = std::numeric_limits<std::uint64_t>::max();
    // Default policy: 26-bit primes leave room for 2^12 unreduced products.
    static constexpr unsigned kDefaultPrimeBits = 26;

    explicit PrimeField(std::uint64_t p, std::uint64_t capacity = kDefaultCapacity);

    std::uint64_t modulus() const noexcept { return p_; }
    std::uint64_t capacity() const noexcept { return capacity_; }
    std::uint64_t max_accumulation() const noexcept { return k_max_; }

    Element zero() const noexcept { return 0; }
    Element one() const noexcept { return 1; }
    Element minus_one() const noexcept { return p_ - 1; }

    Element normalize(std::int64_t x) const noexcept {
        const auto p = static_cast<std::int64_t>(p_);
        std::int64_t r = x % p;
        return static_cast<Element>(r < 0 ? r + p : r);
    }
    Element reduce(std::uint64_t x) const noexcept { return x % p_; }

    Element add(Element a, Element b) const noexcept {
        const Element s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Element sub(Element a, Element b) const noexcept { return a >= b ? a - b : a + (p_ - b); }
    Element neg(Element a) const noexcept { return a == 0 ? 0 : p_ - a; }
    Element mul(Element a, Element b) const noexcept { return (a * b) % p_; }
    // a*x + y
    Element axpy(Element a, Element x, Element y) const noexcept { return (a * x + y) % p_; }
    Element pow(Element a, std::uint64_t e) const noexcept;
    // Extended Euclid; throws DivisionByZero on 0.
    Element inv(Element a) const;

    bool is_canonical(Element a) const noexcept { return a < p_; }

    friend bool operator==(const PrimeField& a, const PrimeField& b) noexcept {
        return a.p_ == b.p_;
    }

private:
    std::uint64_t p_;
    std::uint64_t capacity_;
    std::uint64_t k_max_;
};

} // namespace xla
