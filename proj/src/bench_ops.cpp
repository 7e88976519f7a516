#include "xla/bench_ops.hpp"

#include <charconv>
#include <random>
#include <stdexcept>

#include "xla/matmul.hpp"
#include "xla/sparse_apply.hpp"

namespace xla {

namespace {

std::size_t parse_size(std::string_view s, const std::string& text) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("bad size grid '" + text + "'");
    return v;
}

DenseMatrix random_dense(const PrimeField& f, std::size_t m, std::size_t n, std::mt19937_64& rng) {
    DenseMatrix a(f, m, n);
    std::uniform_int_distribution<Element> d(0, f.modulus() - 1);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = d(rng);
    return a;
}

SparseCSR random_sparse(const PrimeField& f, std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> col(0, n - 1);
    std::uniform_int_distribution<Element> val(0, f.modulus() - 1);
    std::vector<Triplet> t;
    const std::size_t per_row = std::min<std::size_t>(8, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < per_row; ++k) {
            Element v = val(rng);
            if (k % 2 == 0) v = (k % 4 == 0) ? 1 : f.minus_one();
            t.push_back({i, col(rng), v});
        }
    }
    return to_csr(SparseCOO::from_triplets(f, n, n, std::move(t)));
}

std::string field_tag(const PrimeField& f) { return "zp:" + std::to_string(f.modulus()); }

PlotData start(const std::string& op, const PrimeField& f) {
    PlotData data;
    data.meta = {op, field_tag(f), machine_tag(), utc_timestamp()};
    return data;
}

} // namespace

std::vector<std::size_t> parse_size_grid(const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        const std::size_t n = parse_size(text, text);
        if (n == 0) throw std::invalid_argument("bad size grid '" + text + "'");
        return {n};
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || c2 + 2 > text.size())
        throw std::invalid_argument("bad size grid '" + text + "'");
    const std::size_t lo = parse_size(std::string_view(text).substr(0, c1), text);
    const std::size_t hi = parse_size(std::string_view(text).substr(c1 + 1, c2 - c1 - 1), text);
    const char op = text[c2 + 1];
    const std::size_t step = parse_size(std::string_view(text).substr(c2 + 2), text);
    if (lo == 0 || hi < lo || (op != '*' && op != '+') || (op == '*' && step < 2) || (op == '+' && step < 1))
        throw std::invalid_argument("bad size grid '" + text + "'");
    std::vector<std::size_t> sizes;
    for (std::size_t n = lo; n <= hi;) {
        sizes.push_back(n);
        if (op == '*') {
            if (n > hi / step) break;
            n *= step;
        } else {
            if (n > hi - step) break;
            n += step;
        }
    }
    return sizes;
}

PlotData bench_mul(const PrimeField& field, const std::vector<std::size_t>& sizes,
                   const std::vector<std::string>& series, const BenchOptions& options) {
    PlotData data = start("mul", field);
    std::mt19937_64 rng(options.seed);
    for (const auto& name : series) {
        const Method m = parse_method(name);
        auto& s = data.add_series(name);
        for (std::size_t n : sizes) {
            const DenseMatrix a = random_dense(field, n, n, rng), b = random_dense(field, n, n, rng);
            DenseMatrix c(field, n, n);
            MulHelper helper;
            helper.method = m;
            // A forced step at the top, base case below it.
            if (m == Method::Recursive) helper.threshold = n;
            const auto stats = time_op([&] { mul(c, a, b, helper); }, options.repetitions, options.warmup);
            s.points.push_back({n, stats.samples});
        }
    }
    return data;
}

PlotData bench_spmv(const PrimeField& field, const std::vector<std::size_t>& sizes,
                    const std::vector<std::string>& series, const BenchOptions& options) {
    PlotData data = start("spmv", field);
    std::mt19937_64 rng(options.seed);
    for (const auto& name : series) {
        PlanOptions po;
        po.format = parse_format(name);
        auto& s = data.add_series(name);
        for (std::size_t n : sizes) {
            const auto plan = optimize_plan(random_sparse(field, n, rng), po);
            const DenseMatrix x = random_dense(field, n, 1, rng);
            DenseMatrix y(field, n, 1);
            const auto stats =
                time_op([&] { plan.apply(y, x, Side::Right, 1, 0); }, options.repetitions, options.warmup);
            s.points.push_back({n, stats.samples});
        }
    }
    return data;
}

MulTuning tune_mul(const PrimeField& field, const std::vector<std::size_t>& sizes, const BenchOptions& options) {
    MulTuning t;
    t.data = bench_mul(field, sizes, {"base", "winograd"}, options);
    t.result = tune_threshold(*t.data.find("base"), *t.data.find("winograd"));
    return t;
}

} // namespace xla
