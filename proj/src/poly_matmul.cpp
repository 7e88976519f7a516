#include "xla/poly_matmul.hpp"

#include <bit>
#include <string>

#include "xla/errors.hpp"
#include "xla/rns.hpp"

namespace xla {

PolyMatrix::PolyMatrix(const PrimeField& field, std::size_t rows, std::size_t cols, std::size_t degree)
    : field_(field), rows_(rows), cols_(cols) {
    coeffs_.reserve(degree + 1);
    for (std::size_t i = 0; i <= degree; ++i) coeffs_.emplace_back(field, rows, cols);
}

Element find_root(const PrimeField& field, std::size_t n) {
    const std::uint64_t p = field.modulus();
    if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("find_root: order must be a power of two");
    if ((p - 1) % n != 0) {
        throw NoRootError("find_root: no element of order " + std::to_string(n) + " modulo " + std::to_string(p));
    }
    if (n == 1) return 1;
    const std::uint64_t e = (p - 1) / n;
    // Order is exactly n iff w^(n/2) == -1.
    for (Element g = 2; g < p; ++g) {
        const Element w = field.pow(g, e);
        if (field.pow(w, n / 2) == p - 1) return w;
    }
    throw NoRootError("find_root: no generator candidate found modulo " + std::to_string(p));
}

NttPlan::NttPlan(const PrimeField& field, std::size_t n)
    : field_(field), n_(n), root_(find_root(field, n)), n_inv_(field.inv(field.reduce(n))) {
    const unsigned s = static_cast<unsigned>(std::countr_zero(n));
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (unsigned b = 0; b < s; ++b) r |= ((i >> b) & 1) << (s - 1 - b);
        bitrev_[i] = r;
    }
    // twiddles[h + j] = w_len^j for the stage with half-length h.
    auto build = [&](Element w) {
        std::vector<Element> t(std::max<std::size_t>(n, 1));
        for (std::size_t half = 1; half < n; half <<= 1) {
            const Element step = field_.pow(w, n / (2 * half));
            Element cur = 1;
            for (std::size_t j = 0; j < half; ++j) {
                t[half + j] = cur;
                cur = field_.mul(cur, step);
            }
        }
        return t;
    };
    fwd_twiddles_ = build(root_);
    inv_twiddles_ = build(field_.inv(root_));
}

void NttPlan::transform(std::span<Element> v, const std::vector<Element>& twiddles) const {
    if (v.size() != n_) {
        throw DimensionError("ntt: vector of length " + std::to_string(v.size()) + " for a plan of length " +
                             std::to_string(n_));
    }
    for (std::size_t i = 0; i < n_; ++i) {
        if (i < bitrev_[i]) std::swap(v[i], v[bitrev_[i]]);
    }
    for (std::size_t half = 1; half < n_; half <<= 1) {
        for (std::size_t start = 0; start < n_; start += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
                const Element u = v[start + j];
                const Element t = field_.mul(twiddles[half + j], v[start + j + half]);
                v[start + j] = field_.add(u, t);
                v[start + j + half] = field_.sub(u, t);
            }
        }
    }
}

void NttPlan::forward(std::span<Element> v) const { transform(v, fwd_twiddles_); }

void NttPlan::inverse(std::span<Element> v) const {
    transform(v, inv_twiddles_);
    for (auto& x : v) x = field_.mul(x, n_inv_);
}

namespace {

// Evaluate every entry polynomial at the n roots: result[t] is the matrix of
// values at w^t.
std::vector<DenseMatrix> evaluate(const PolyMatrix& a, const NttPlan& plan) {
    const std::size_t n = plan.size();
    std::vector<DenseMatrix> values;
    values.reserve(n);
    for (std::size_t t = 0; t < n; ++t) values.emplace_back(a.field(), a.rows(), a.cols());
    std::vector<Element> buf(n);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            std::fill(buf.begin(), buf.end(), 0);
            for (std::size_t d = 0; d <= a.degree(); ++d) buf[d] = a.coeff(d)(i, j);
            plan.forward(buf);
            for (std::size_t t = 0; t < n; ++t) values[t](i, j) = buf[t];
        }
    }
    return values;
}

PolyMatrix mul_by_evaluation(const PolyMatrix& a, const PolyMatrix& b, std::size_t n, const MulHelper& helper) {
    const NttPlan plan(a.field(), n);
    const auto va = evaluate(a, plan);
    const auto vb = evaluate(b, plan);
    std::vector<DenseMatrix> vc;
    vc.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        MulHelper h = helper;
        h.alpha = 1;
        h.beta = 0;
        vc.push_back(mul(va[t], vb[t], h));
    }
    PolyMatrix c(a.field(), a.rows(), b.cols(), a.degree() + b.degree());
    std::vector<Element> buf(n);
    for (std::size_t i = 0; i < c.rows(); ++i) {
        for (std::size_t j = 0; j < c.cols(); ++j) {
            for (std::size_t t = 0; t < n; ++t) buf[t] = vc[t](i, j);
            plan.inverse(buf);
            for (std::size_t d = 0; d <= c.degree(); ++d) c.coeff(d)(i, j) = buf[d];
        }
    }
    return c;
}

PolyMatrix rebind(const PolyMatrix& a, const PrimeField& target) {
    PolyMatrix out(target, a.rows(), a.cols(), a.degree());
    for (std::size_t d = 0; d <= a.degree(); ++d) out.coeff(d) = rebind(a.coeff(d), target);
    return out;
}

} // namespace

PolyMatrix poly_mul(const PolyMatrix& a, const PolyMatrix& b, const MulHelper& helper) {
    if (a.cols() != b.rows()) throw DimensionError("poly_mul: inner dimensions disagree");
    if (!(a.field() == b.field())) throw DimensionError("poly_mul: operands live in different fields");
    const std::size_t n = std::bit_ceil(a.degree() + b.degree() + 1);
    const PrimeField& f = a.field();
    if ((f.modulus() - 1) % n == 0) return mul_by_evaluation(a, b, n, helper);

    // Coefficients of the integer product are below k*(p-1)^2*(min(dA,dB)+1).
    const mpz_class top(static_cast<unsigned long>(f.modulus() - 1));
    const mpz_class bound = mpz_class(static_cast<unsigned long>(a.cols())) * top * top *
                            static_cast<unsigned long>(std::min(a.degree(), b.degree()) + 1);
    const RnsBasis basis = rns_build_with_divisor(bound > 0 ? bound : mpz_class(1), PrimeField::kDefaultPrimeBits, n);

    std::vector<PolyMatrix> images;
    images.reserve(basis.size());
    for (const auto& q : basis.fields()) images.push_back(mul_by_evaluation(rebind(a, q), rebind(b, q), n, helper));

    PolyMatrix c(f, a.rows(), b.cols(), a.degree() + b.degree());
    std::vector<Element> residues(basis.size());
    mpz_class value;
    for (std::size_t d = 0; d <= c.degree(); ++d) {
        for (std::size_t i = 0; i < c.rows(); ++i) {
            for (std::size_t j = 0; j < c.cols(); ++j) {
                for (std::size_t q = 0; q < basis.size(); ++q) residues[q] = images[q].coeff(d)(i, j);
                basis.reconstruct(residues, value);
                c.coeff(d)(i, j) = mpz_fdiv_ui(value.get_mpz_t(), f.modulus());
            }
        }
    }
    return c;
}

} // namespace xla
