#include "xla/matmul.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <vector>

#include "xla/config.hpp"

namespace xla {

std::string to_string(Method m) {
    switch (m) {
    case Method::Auto: return "auto";
    case Method::BaseCase: return "base";
    case Method::Recursive: return "winograd";
    }
    return "auto";
}

Method parse_method(const std::string& s) {
    if (s == "auto") return Method::Auto;
    if (s == "base" || s == "basecase") return Method::BaseCase;
    if (s == "winograd" || s == "recursive") return Method::Recursive;
    throw std::invalid_argument("unknown multiplication method '" + s + "'");
}

namespace {

struct Dispatch {
    Method method;
    std::size_t threshold;
    const MethodTable* table;
    MulCounters* counters;
};

std::string shape(std::size_t m, std::size_t n) { return std::to_string(m) + "x" + std::to_string(n); }

bool overlaps(ConstMatrixView x, ConstMatrixView y) {
    if (x.rows() == 0 || x.cols() == 0 || y.rows() == 0 || y.cols() == 0) return false;
    const Element* x0 = x.data();
    const Element* x1 = x.data() + (x.rows() - 1) * x.stride() + x.cols();
    const Element* y0 = y.data();
    const Element* y1 = y.data() + (y.rows() - 1) * y.stride() + y.cols();
    std::less<const Element*> lt;
    return lt(x0, y1) && lt(y0, x1);
}

void validate(ConstMatrixView c, ConstMatrixView a, ConstMatrixView b) {
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
        throw DimensionError("mul: cannot form " + shape(c.rows(), c.cols()) + " <- " + shape(a.rows(), a.cols()) +
                             " * " + shape(b.rows(), b.cols()));
    }
    if (!(a.field() == b.field()) || !(a.field() == c.field())) {
        throw DimensionError("mul: operands live in different fields");
    }
    if (overlaps(c, a) || overlaps(c, b)) throw std::invalid_argument("mul: output aliases an input");
}

// out <- x + y, out <- x - y; out may alias x or y.
void add(MatrixView out, ConstMatrixView x, ConstMatrixView y) {
    const PrimeField& f = out.field();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto o = out.row(i);
        auto xr = x.row(i);
        auto yr = y.row(i);
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = f.add(xr[j], yr[j]);
    }
}

void sub(MatrixView out, ConstMatrixView x, ConstMatrixView y) {
    const PrimeField& f = out.field();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto o = out.row(i);
        auto xr = x.row(i);
        auto yr = y.row(i);
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = f.sub(xr[j], yr[j]);
    }
}

// out <- beta*out + x
void scale_add(MatrixView out, Element beta, ConstMatrixView x) {
    const PrimeField& f = out.field();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto o = out.row(i);
        auto xr = x.row(i);
        for (std::size_t j = 0; j < o.size(); ++j) o[j] = f.add(f.mul(beta, o[j]), xr[j]);
    }
}

bool wants_recursion(const Dispatch& d, std::size_t m, std::size_t k, std::size_t n) {
    const std::size_t mn = std::min({m, k, n});
    if (mn < 2 || d.method == Method::BaseCase) return false;
    if (d.table) return parse_method(d.table->lookup(mn)) == Method::Recursive;
    return mn >= 2 * d.threshold;
}

void step(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta, const Dispatch& d);

// Fig. 1 controller: every plugin calls back into here.
void controller(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta, const Dispatch& d,
                bool top) {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const bool forced = top && d.method == Method::Recursive && std::min({m, k, n}) >= 2;
    if (forced || wants_recursion(d, m, k, n)) {
        step(c, a, b, alpha, beta, d);
    } else {
        ++d.counters->base_cases;
        base_case_gemm(c, a, b, alpha, beta);
    }
}

void even_step(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta, const Dispatch& d) {
    const PrimeField& f = c.field();
    const std::size_t m2 = a.rows() / 2, k2 = a.cols() / 2, n2 = b.cols() / 2;
    auto A11 = a.submatrix(0, 0, m2, k2), A12 = a.submatrix(0, k2, m2, k2);
    auto A21 = a.submatrix(m2, 0, m2, k2), A22 = a.submatrix(m2, k2, m2, k2);
    auto B11 = b.submatrix(0, 0, k2, n2), B12 = b.submatrix(0, n2, k2, n2);
    auto B21 = b.submatrix(k2, 0, k2, n2), B22 = b.submatrix(k2, n2, k2, n2);
    auto C11 = c.submatrix(0, 0, m2, n2), C12 = c.submatrix(0, n2, m2, n2);
    auto C21 = c.submatrix(m2, 0, m2, n2), C22 = c.submatrix(m2, n2, m2, n2);
    auto rec = [&](MatrixView out, ConstMatrixView x, ConstMatrixView y, Element s, Element t) {
        controller(out, x, y, s, t, d, false);
    };

    if (beta == 0) {
        // Two temporaries: X holds S_i and later P1, Y holds T_i.
        DenseMatrix xbuf(f, m2, std::max(k2, n2));
        DenseMatrix ybuf(f, k2, n2);
        MatrixView X = xbuf.submatrix(0, 0, m2, k2);
        MatrixView Y = ybuf.view();

        sub(X, A11, A21);          // S3
        sub(Y, B22, B12);          // T3
        rec(C21, X, Y, alpha, 0);  // P7
        add(X, A21, A22);          // S1
        sub(Y, B12, B11);          // T1
        rec(C22, X, Y, alpha, 0);  // P5
        sub(X, X, A11);            // S2
        sub(Y, B22, Y);            // T2
        rec(C12, X, Y, alpha, 0);  // P6
        sub(X, A12, X);            // S4
        rec(C11, X, B22, alpha, 0); // P3
        MatrixView P1 = xbuf.submatrix(0, 0, m2, n2);
        rec(P1, A11, B11, alpha, 0);
        add(C12, P1, C12);         // U2 = P1 + P6
        add(C21, C12, C21);        // U3 = U2 + P7
        add(C12, C12, C22);        // U4 = U2 + P5
        add(C22, C21, C22);        // U7 = U3 + P5
        add(C12, C12, C11);        // U5 = U4 + P3
        sub(Y, Y, B21);            // T4
        rec(C11, A22, Y, alpha, 0); // P4
        sub(C21, C21, C11);        // U6 = U3 - P4
        rec(C11, A12, B21, alpha, 0); // P2
        add(C11, P1, C11);         // U1 = P1 + P2
    } else {
        // Accumulation: C <- alpha*A*B + beta*C with three temporaries.
        DenseMatrix xbuf(f, m2, k2), ybuf(f, k2, n2), zbuf(f, m2, n2);
        MatrixView X = xbuf.view(), Y = ybuf.view(), Z = zbuf.view();

        add(X, A21, A22);          // S1
        sub(Y, B12, B11);          // T1
        rec(Z, X, Y, alpha, 0);    // P5
        scale_add(C22, beta, Z);
        scale_add(C12, beta, Z);
        sub(X, X, A11);            // S2
        sub(Y, B22, Y);            // T2
        rec(Z, A11, B11, alpha, 0); // P1
        scale_add(C11, beta, Z);
        rec(Z, X, Y, alpha, 1);    // U2 = P1 + P6
        sub(X, A12, X);            // S4
        rec(C12, X, B22, alpha, 1); // + P3
        add(C12, C12, Z);          // P5 + P3 + U2
        sub(Y, Y, B21);            // T4
        rec(C21, A22, Y, f.neg(alpha), beta); // -P4
        sub(X, A11, A21);          // S3
        sub(Y, B22, B12);          // T3
        rec(Z, X, Y, alpha, 1);    // U3 = U2 + P7
        add(C21, C21, Z);          // U6
        add(C22, C22, Z);          // U7
        rec(C11, A12, B21, alpha, 1); // U1 = P1 + P2
    }
}

void step(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta, const Dispatch& d) {
    ++d.counters->recursive_steps;
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const std::size_t me = m & ~std::size_t{1}, ke = k & ~std::size_t{1}, ne = n & ~std::size_t{1};

    // Dynamic peeling: Winograd on the even core, then fix the odd boundary.
    even_step(c.submatrix(0, 0, me, ne), a.submatrix(0, 0, me, ke), b.submatrix(0, 0, ke, ne), alpha, beta, d);
    if (ke < k) {
        ++d.counters->peel_updates;
        base_case_gemm(c.submatrix(0, 0, me, ne), a.submatrix(0, ke, me, 1), b.submatrix(ke, 0, 1, ne), alpha, 1);
    }
    if (ne < n) {
        ++d.counters->peel_updates;
        base_case_gemm(c.submatrix(0, ne, m, 1), a, b.submatrix(0, ne, k, 1), alpha, beta);
    }
    if (me < m) {
        ++d.counters->peel_updates;
        base_case_gemm(c.submatrix(me, 0, 1, ne), a.submatrix(me, 0, 1, k), b.submatrix(0, 0, k, ne), alpha, beta);
    }
}

// Owns the tuned table for the duration of one top-level call.
struct ResolvedHelper {
    Dispatch dispatch;
    std::shared_ptr<const TunedConfig> config;
    std::unique_ptr<MethodTable> table;
};

ResolvedHelper resolve(MulHelper& h) {
    ResolvedHelper r{{h.method, MulHelper::kDefaultThreshold, nullptr, &h.counters}, nullptr, nullptr};
    if (h.threshold) {
        if (*h.threshold == 0) throw std::invalid_argument("mul: threshold must be >= 1");
        r.dispatch.threshold = *h.threshold;
    }
    if (h.method == Method::Auto && h.table && !h.table->empty()) {
        r.dispatch.table = h.table;
        return r;
    }
    if (h.threshold) return r;
    r.config = global_config();
    if (h.method == Method::Auto) {
        if (auto t = r.config->get("mul.methods"); t && !t->empty()) {
            r.table = std::make_unique<MethodTable>(MethodTable::parse(*t));
            r.dispatch.table = r.table.get();
            return r;
        }
    }
    if (auto t = r.config->get_size("mul.threshold"); t && *t > 0) r.dispatch.threshold = *t;
    return r;
}

} // namespace

void base_case_gemm(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta) {
    const PrimeField& f = c.field();
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const std::size_t block = static_cast<std::size_t>(std::min<std::uint64_t>(f.max_accumulation(), k ? k : 1));
    std::vector<std::uint64_t> acc(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        const auto arow = a.row(i);
        for (std::size_t k0 = 0; k0 < k; k0 += block) {
            const std::size_t k1 = std::min(k, k0 + block);
            for (std::size_t kk = k0; kk < k1; ++kk) {
                const std::uint64_t aik = arow[kk];
                if (aik == 0) continue;
                const Element* brow = b.data() + kk * b.stride();
                std::uint64_t* __restrict acc_p = acc.data();
                for (std::size_t j = 0; j < n; ++j) acc_p[j] += aik * brow[j];
            }
            if (k1 < k) {
                for (auto& v : acc) v = f.reduce(v);
            }
        }
        auto crow = c.row(i);
        if (beta == 0) {
            for (std::size_t j = 0; j < n; ++j) crow[j] = f.mul(alpha, f.reduce(acc[j]));
        } else {
            for (std::size_t j = 0; j < n; ++j) crow[j] = f.add(f.mul(alpha, f.reduce(acc[j])), f.mul(beta, crow[j]));
        }
    }
}

void mul(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper& helper) {
    validate(c, a, b);
    auto r = resolve(helper);
    const PrimeField& f = c.field();
    controller(c, a, b, f.reduce(helper.alpha), f.reduce(helper.beta), r.dispatch, true);
}

void mul(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper&& helper) { mul(c, a, b, helper); }

DenseMatrix mul(ConstMatrixView a, ConstMatrixView b, MulHelper& helper) {
    DenseMatrix c(a.field(), a.rows(), b.cols());
    mul(c, a, b, helper);
    return c;
}

DenseMatrix mul(ConstMatrixView a, ConstMatrixView b, MulHelper&& helper) { return mul(a, b, helper); }

void winograd_step(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper& helper) {
    validate(c, a, b);
    if (std::min({a.rows(), a.cols(), b.cols()}) < 2) {
        throw DimensionError("winograd_step: every dimension must be at least 2");
    }
    auto r = resolve(helper);
    const PrimeField& f = c.field();
    step(c, a, b, f.reduce(helper.alpha), f.reduce(helper.beta), r.dispatch);
}

void apply_dense(ConstMatrixView a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
                 MulHelper helper) {
    check_apply_shape(a.rows(), a.cols(), y, x, side, "apply");
    helper.alpha = alpha;
    helper.beta = beta;
    if (side == Side::Right) {
        mul(y, a, x, helper);
    } else {
        const DenseMatrix at = transpose(a);
        mul(y, at, x, helper);
    }
}

void ConstMatrixView::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    apply_dense(*this, y, x, side, alpha, beta);
}

} // namespace xla
