#include "xla/field.hpp"

#include <stdexcept>
#include <string>

#include "xla/errors.hpp"

namespace xla {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) noexcept {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) noexcept {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

} // namespace

bool is_prime(std::uint64_t n) noexcept {
    if (n < 2) return false;
    for (std::uint64_t q : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        if (n % q == 0) return n == q;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are sufficient below 2^64.
    for (std::uint64_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::uint64_t delayed_bound(std::uint64_t p, std::uint64_t capacity) {
    if (p < 2) throw std::invalid_argument("delayed_bound: modulus must be >= 2");
    const u128 top = p - 1;
    const u128 sq = top * top;
    if (static_cast<u128>(capacity) < sq + top) {
        throw std::invalid_argument("delayed_bound: accumulator capacity " + std::to_string(capacity) +
                                    " cannot hold a single product modulo " + std::to_string(p));
    }
    return static_cast<std::uint64_t>((capacity - top) / sq);
}

PrimeField::PrimeField(std::uint64_t p, std::uint64_t capacity) : p_(p), capacity_(capacity) {
    if (!is_prime(p)) throw std::invalid_argument("PrimeField: " + std::to_string(p) + " is not prime");
    k_max_ = delayed_bound(p, capacity);
}

Element PrimeField::pow(Element a, std::uint64_t e) const noexcept {
    Element r = 1 % p_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Element PrimeField::inv(Element a) const {
    a %= p_;
    if (a == 0) throw DivisionByZero("PrimeField::inv: zero has no inverse");
    std::int64_t r0 = static_cast<std::int64_t>(p_), r1 = static_cast<std::int64_t>(a);
    std::int64_t t0 = 0, t1 = 1;
    while (r1 != 0) {
        const std::int64_t q = r0 / r1;
        std::int64_t tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    return normalize(t0);
}

} // namespace xla
