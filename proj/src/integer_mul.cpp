#include "xla/integer_mul.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "xla/errors.hpp"

namespace xla {

DigitDecomposition decompose(const IntegerMatrix& a, unsigned digit_bits) {
    if (digit_bits == 0 || digit_bits > 32) throw std::invalid_argument("decompose: digit width must be in [1, 32]");
    DigitDecomposition d;
    d.digit_bits = digit_bits;
    d.entries = a.rows() * a.cols();
    const std::size_t bits = mpz_sizeinbase(a.max_abs().get_mpz_t(), 2);
    d.digits = std::max<std::size_t>(1, (bits + digit_bits - 1) / digit_bits);
    d.values.assign(d.entries * d.digits, 0);
    d.negative.assign(d.entries, false);
    mpz_class mag, digit;
    for (std::size_t e = 0; e < d.entries; ++e) {
        const mpz_class& v = a.entries()[e];
        d.negative[e] = sgn(v) < 0;
        mag = abs(v);
        for (std::size_t j = 0; j < d.digits && sgn(mag) != 0; ++j) {
            mpz_fdiv_r_2exp(digit.get_mpz_t(), mag.get_mpz_t(), digit_bits);
            d.values[e * d.digits + j] = digit.get_ui();
            mpz_fdiv_q_2exp(mag.get_mpz_t(), mag.get_mpz_t(), digit_bits);
        }
    }
    return d;
}

IntegerMatrix recompose(const DigitDecomposition& d, std::size_t rows, std::size_t cols) {
    if (rows * cols != d.entries) throw DimensionError("recompose: shape does not match the decomposition");
    IntegerMatrix out(rows, cols);
    for (std::size_t e = 0; e < d.entries; ++e) {
        mpz_class v = 0;
        for (std::size_t j = d.digits; j-- > 0;) {
            v <<= d.digit_bits;
            v += static_cast<unsigned long>(d(e, j));
        }
        out(e / cols, e % cols) = d.negative[e] ? mpz_class(-v) : v;
    }
    return out;
}

mpz_class result_bound(const IntegerMatrix& a, const IntegerMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("result_bound: inner dimensions disagree");
    return mpz_class(static_cast<unsigned long>(a.cols())) * a.max_abs() * b.max_abs();
}

namespace {

std::vector<DenseMatrix> reduce_per_entry(const IntegerMatrix& a, const RnsBasis& basis) {
    std::vector<DenseMatrix> out;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const auto q = basis.primes()[i];
        DenseMatrix r(basis.fields()[i], a.rows(), a.cols());
        for (std::size_t row = 0; row < a.rows(); ++row) {
            for (std::size_t col = 0; col < a.cols(); ++col) r(row, col) = mpz_fdiv_ui(a(row, col).get_mpz_t(), q);
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Residues as one product: digits (entries x d) times powers (d x L) with
// powers[j][i] = 2^(digit_bits*j) mod q_i, then a final reduction and signs.
std::vector<DenseMatrix> reduce_by_product(const IntegerMatrix& a, const RnsBasis& basis) {
    const DigitDecomposition dec = decompose(a);
    const std::size_t L = basis.size(), d = dec.digits;

    std::vector<std::uint64_t> powers(d * L);
    for (std::size_t i = 0; i < L; ++i) {
        const PrimeField& f = basis.fields()[i];
        const Element radix = f.reduce(std::uint64_t{1} << dec.digit_bits);
        Element p = 1 % f.modulus();
        for (std::size_t j = 0; j < d; ++j) {
            powers[j * L + i] = p;
            p = f.mul(p, radix);
        }
    }

    // Terms are below 2^digit_bits * q_max; reduce before the accumulator can wrap.
    const std::uint64_t qmax = *std::max_element(basis.primes().begin(), basis.primes().end());
    const std::uint64_t term = ((std::uint64_t{1} << dec.digit_bits) - 1) * (qmax - 1);
    const std::uint64_t block = term ? (std::numeric_limits<std::uint64_t>::max() - qmax) / term : d;
    if (block == 0) throw std::logic_error("reduce_by_product: digit width too large for the accumulator");

    std::vector<DenseMatrix> out;
    for (std::size_t i = 0; i < L; ++i) out.emplace_back(basis.fields()[i], a.rows(), a.cols());

    std::vector<std::uint64_t> acc(L);
    for (std::size_t e = 0; e < dec.entries; ++e) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t j0 = 0; j0 < d; j0 += block) {
            const std::size_t j1 = std::min(d, j0 + block);
            for (std::size_t j = j0; j < j1; ++j) {
                const std::uint64_t digit = dec(e, j);
                if (!digit) continue;
                const std::uint64_t* prow = powers.data() + j * L;
                for (std::size_t i = 0; i < L; ++i) acc[i] += digit * prow[i];
            }
            if (j1 < d) {
                for (std::size_t i = 0; i < L; ++i) acc[i] = basis.fields()[i].reduce(acc[i]);
            }
        }
        const std::size_t row = e / a.cols(), col = e % a.cols();
        for (std::size_t i = 0; i < L; ++i) {
            const PrimeField& f = basis.fields()[i];
            const Element r = f.reduce(acc[i]);
            out[i](row, col) = dec.negative[e] ? f.neg(r) : r;
        }
    }
    return out;
}

} // namespace

std::vector<DenseMatrix> multimodular_reduce(const IntegerMatrix& a, const RnsBasis& basis,
                                             ReductionStrategy strategy) {
    if (strategy == ReductionStrategy::PerEntry) return reduce_per_entry(a, basis);
    return reduce_by_product(a, basis);
}

IntegerMatrix mul_crt(const IntegerMatrix& a, const IntegerMatrix& b, ReductionStrategy strategy,
                      const MulHelper& helper) {
    if (a.cols() != b.rows()) {
        throw DimensionError("mul_crt: cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
    IntegerMatrix c(a.rows(), b.cols());
    const mpz_class bound = result_bound(a, b);
    if (sgn(bound) == 0 || c.rows() == 0 || c.cols() == 0) return c;

    const RnsBasis basis = rns_build(bound);
    const auto ra = multimodular_reduce(a, basis, strategy);
    const auto rb = multimodular_reduce(b, basis, strategy);

    std::vector<DenseMatrix> rc;
    rc.reserve(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        MulHelper h = helper;
        h.alpha = 1;
        h.beta = 0;
        rc.push_back(mul(ra[i], rb[i], h));
    }

    std::vector<Element> residues(basis.size());
    for (std::size_t r = 0; r < c.rows(); ++r) {
        for (std::size_t col = 0; col < c.cols(); ++col) {
            for (std::size_t i = 0; i < basis.size(); ++i) residues[i] = rc[i](r, col);
            basis.reconstruct(residues, c(r, col));
        }
    }
    return c;
}

} // namespace xla
