// Command-line front end: mul, spmv, convert, bench, tune, regress.
//
// Exit codes: 0 ok, 1 parse/input error, 2 dimension mismatch,
// 3 regression fail or indeterminate, 4 tuner could not fit.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "xla/bench.hpp"
#include "xla/bench_ops.hpp"
#include "xla/config.hpp"
#include "xla/errors.hpp"
#include "xla/integer_mul.hpp"
#include "xla/matmul.hpp"
#include "xla/matrix_market.hpp"
#include "xla/sparse_apply.hpp"
#include "xla/tuner.hpp"

using namespace xla;

namespace {

enum Exit { kOk = 0, kParse = 1, kDimension = 2, kRegression = 3, kTuner = 4 };

std::uint64_t default_prime() {
    std::uint64_t p = (std::uint64_t{1} << PrimeField::kDefaultPrimeBits) - 1;
    while (!is_prime(p)) --p;
    return p;
}

// Writes to a file, or to stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    fn(out);
    if (!out) throw std::runtime_error("error writing '" + path + "'");
}

MmMatrix read_matrix(const std::string& path, const std::optional<FieldSpec>& field) {
    try {
        return mm_read_file(path, field);
    } catch (const ParseError& e) {
        throw ParseError(0, path + ": " + e.what());
    }
}

std::optional<FieldSpec> field_flag(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return FieldSpec::parse(text);
}

// Field of a parsed matrix.
FieldSpec field_of(const MmMatrix& m) {
    if (auto* d = std::get_if<DenseMatrix>(&m)) return FieldSpec{d->field().modulus()};
    if (auto* s = std::get_if<SparseCOO>(&m)) return FieldSpec{s->field().modulus()};
    return FieldSpec{};
}

DenseMatrix as_dense(const MmMatrix& m) {
    if (auto* d = std::get_if<DenseMatrix>(&m)) return *d;
    return to_dense(std::get<SparseCOO>(m));
}

struct MulArgs {
    std::string a, b, c, out = "-", field, method = "auto";
    std::optional<std::size_t> threshold;
    std::string alpha = "1", beta = "0";
};

int cmd_mul(const MulArgs& args) {
    const auto expected = field_flag(args.field);
    const MmMatrix a = read_matrix(args.a, expected);
    const MmMatrix b = read_matrix(args.b, expected);
    if (!(field_of(a) == field_of(b)))
        throw ParseError(0, "operands are over different fields (" + field_of(a).str() + " vs " + field_of(b).str() + ")");
    std::optional<MmMatrix> c0;
    if (!args.c.empty()) c0 = read_matrix(args.c, field_of(a));
    const mpz_class alpha(args.alpha), beta(args.beta);

    if (field_of(a).is_integer()) {
        const auto& ia = std::get<IntegerMatrix>(a);
        const auto& ib = std::get<IntegerMatrix>(b);
        MulHelper helper;
        helper.method = parse_method(args.method);
        helper.threshold = args.threshold;
        IntegerMatrix c = mul_crt(ia, ib, ReductionStrategy::MatrixProduct, helper);
        if (alpha != 1 || beta != 0) {
            const IntegerMatrix* prev = c0 ? &std::get<IntegerMatrix>(*c0) : nullptr;
            if (prev && (prev->rows() != c.rows() || prev->cols() != c.cols()))
                throw DimensionError("initial C has the wrong shape");
            for (std::size_t i = 0; i < c.rows(); ++i)
                for (std::size_t j = 0; j < c.cols(); ++j) {
                    c(i, j) *= alpha;
                    if (prev) c(i, j) += beta * (*prev)(i, j);
                }
        }
        with_output(args.out, [&](std::ostream& o) { mm_write(o, c); });
        return kOk;
    }

    const DenseMatrix da = as_dense(a), db = as_dense(b);
    const PrimeField& f = da.field();
    auto to_element = [&](const mpz_class& v) {
        mpz_class r = v % static_cast<unsigned long>(f.modulus());
        if (r < 0) r += static_cast<unsigned long>(f.modulus());
        return static_cast<Element>(r.get_ui());
    };
    DenseMatrix c = c0 ? as_dense(*c0) : DenseMatrix(f, da.rows(), db.cols());
    MulHelper helper;
    helper.method = parse_method(args.method);
    helper.threshold = args.threshold;
    helper.alpha = to_element(alpha);
    helper.beta = to_element(beta);
    mul(c, da, db, helper);
    // The result keeps B's storage form.
    with_output(args.out, [&](std::ostream& o) {
        if (std::holds_alternative<SparseCOO>(b))
            mm_write(o, convert<SparseCOO>(c));
        else
            mm_write(o, c.view());
    });
    return kOk;
}

struct SpmvArgs {
    std::string a, x, out = "-", field, format = "auto", side = "right";
};

int cmd_spmv(const SpmvArgs& args) {
    const auto expected = field_flag(args.field);
    const MmMatrix a = read_matrix(args.a, expected);
    if (field_of(a).is_integer()) throw ParseError(0, "spmv needs a prime field");
    const MmMatrix x = read_matrix(args.x, field_of(a));
    const SparseCSR csr = std::holds_alternative<SparseCOO>(a) ? to_csr(std::get<SparseCOO>(a))
                                                                : to_csr(std::get<DenseMatrix>(a));
    PlanOptions options = default_plan_options();
    if (args.format != "auto") options.format = parse_format(args.format);
    Side side;
    if (args.side == "right")
        side = Side::Right;
    else if (args.side == "left")
        side = Side::Left;
    else
        throw std::invalid_argument("--side must be left or right");
    const DenseMatrix dx = as_dense(x);
    DenseMatrix y(csr.field(), side == Side::Right ? csr.rows() : csr.cols(), dx.cols());
    const SpmvPlan plan = optimize_plan(csr, options);
    plan.apply(y, dx, side, 1, 0);
    std::cerr << "plan: format=" << to_string(plan.format()) << " transpose_cache=" << plan.has_transpose() << "\n";
    with_output(args.out, [&](std::ostream& o) { mm_write(o, y.view()); });
    return kOk;
}

struct ConvertArgs {
    std::string in, out = "-", to, field;
};

int cmd_convert(const ConvertArgs& args) {
    const MmMatrix m = read_matrix(args.in, field_flag(args.field));
    if (args.to != "coo" && args.to != "csr" && args.to != "dense")
        throw std::invalid_argument("--to must be coo, csr or dense");
    if (auto* im = std::get_if<IntegerMatrix>(&m)) {
        if (args.to != "dense") throw std::invalid_argument("integer matrices convert only to dense");
        with_output(args.out, [&](std::ostream& o) { mm_write(o, *im); });
        return kOk;
    }
    with_output(args.out, [&](std::ostream& o) {
        if (args.to == "dense")
            mm_write(o, as_dense(m).view());
        else if (args.to == "csr")
            mm_write(o, std::holds_alternative<SparseCOO>(m) ? to_csr(std::get<SparseCOO>(m)) : to_csr(std::get<DenseMatrix>(m)));
        else
            mm_write(o, std::holds_alternative<SparseCOO>(m) ? std::get<SparseCOO>(m) : convert<SparseCOO>(std::get<DenseMatrix>(m)));
    });
    return kOk;
}

struct BenchArgs {
    std::string op = "mul", sizes, field, csv = "-", gnuplot;
    std::vector<std::string> series;
    std::size_t reps = 3, warmup = 1;
};

PrimeField bench_field(const std::string& text) {
    if (text.empty()) return PrimeField(default_prime());
    const FieldSpec spec = FieldSpec::parse(text);
    if (spec.is_integer()) throw std::invalid_argument("benchmarks need a prime field");
    return spec.prime_field();
}

int cmd_bench(const BenchArgs& args) {
    const auto sizes = parse_size_grid(args.sizes);
    const PrimeField f = bench_field(args.field);
    BenchOptions options;
    options.repetitions = args.reps;
    options.warmup = args.warmup;
    PlotData data;
    if (args.op == "mul") {
        data = bench_mul(f, sizes, args.series.empty() ? std::vector<std::string>{"base", "winograd", "auto"} : args.series,
                         options);
    } else if (args.op == "spmv") {
        data = bench_spmv(f, sizes, args.series.empty() ? std::vector<std::string>{"coo", "csr", "hyb"} : args.series,
                          options);
    } else {
        throw std::invalid_argument("--op must be mul or spmv");
    }
    if (!args.gnuplot.empty() && args.csv != "-") {
        PlotStyle style;
        style.kind = PlotStyle::Kind::Gnuplot;
        style.title = args.op + " over " + data.meta.field;
        plot_emit(data, style, args.csv, std::filesystem::path(args.gnuplot));
        return kOk;
    }
    with_output(args.csv, [&](std::ostream& o) { write_csv(o, data); });
    if (!args.gnuplot.empty()) {
        PlotStyle style;
        style.kind = PlotStyle::Kind::Gnuplot;
        style.title = args.op + " over " + data.meta.field;
        with_output(args.gnuplot, [&](std::ostream& o) { write_gnuplot(o, data, style, "-"); });
    }
    return kOk;
}

struct TuneArgs {
    std::string op = "mul", sizes, field, out, csv;
    std::size_t reps = 3, warmup = 1;
};

int cmd_tune(const TuneArgs& args) {
    if (args.op != "mul") throw std::invalid_argument("--op must be mul");
    const auto sizes = parse_size_grid(args.sizes);
    const PrimeField f = bench_field(args.field);
    BenchOptions options;
    options.repetitions = args.reps;
    options.warmup = args.warmup;
    const MulTuning t = tune_mul(f, sizes, options);
    if (!args.csv.empty()) with_output(args.csv, [&](std::ostream& o) { write_csv(o, t.data); });

    TunedConfig cfg;
    if (std::filesystem::exists(args.out)) cfg = TunedConfig::load(args.out);
    t.result.store(cfg);
    cfg.set("mul.methods", t.result.table.serialize());
    cfg.save(args.out);
    std::cerr << "crossover: " << to_string(t.result.crossing) << " at n=" << t.result.threshold
              << ", controller threshold " << t.result.controller_threshold() << "\n";
    return kOk;
}

struct RegressArgs {
    std::string baseline, current;
    double tol = 0.1;
};

int cmd_regress(const RegressArgs& args) {
    const auto baseline = RegressionBaseline::load(args.baseline);
    const auto current = read_csv_file(args.current);
    const auto report = regression_check(current, baseline, args.tol);
    report.print(std::cerr);
    std::cout << to_string(report.status) << "\n";
    return report.status == RegressionReport::Status::Pass ? kOk : kRegression;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact linear algebra over word-size prime fields and the integers"};
    app.require_subcommand(1);

    MulArgs mul_args;
    auto* mul_cmd = app.add_subcommand("mul", "C = alpha*A*B + beta*C");
    mul_cmd->add_option("A", mul_args.a, "left operand (.mtx)")->required();
    mul_cmd->add_option("B", mul_args.b, "right operand (.mtx)")->required();
    mul_cmd->add_option("--field", mul_args.field, "zp:<p> or int");
    mul_cmd->add_option("--method", mul_args.method, "auto, base or winograd")
        ->check(CLI::IsMember({"auto", "base", "winograd"}));
    mul_cmd->add_option("--threshold", mul_args.threshold, "recursion threshold")->check(CLI::PositiveNumber);
    mul_cmd->add_option("--alpha", mul_args.alpha, "scalar on A*B");
    mul_cmd->add_option("--beta", mul_args.beta, "scalar on the initial C");
    mul_cmd->add_option("-c,--initial", mul_args.c, "initial C for beta (zero when absent)");
    mul_cmd->add_option("-o,--output", mul_args.out, "output file, - for stdout");

    SpmvArgs spmv_args;
    auto* spmv_cmd = app.add_subcommand("spmv", "y = A x (right) or y = A^T x (left)");
    spmv_cmd->add_option("A", spmv_args.a, "sparse matrix (.mtx)")->required();
    spmv_cmd->add_option("x", spmv_args.x, "vector or block of vectors (.mtx)")->required();
    spmv_cmd->add_option("--field", spmv_args.field, "zp:<p>");
    spmv_cmd->add_option("--format", spmv_args.format, "auto, coo, csr or hyb")
        ->check(CLI::IsMember({"auto", "coo", "csr", "hyb"}));
    spmv_cmd->add_option("--side", spmv_args.side, "left or right")->check(CLI::IsMember({"left", "right"}));
    spmv_cmd->add_option("-o,--output", spmv_args.out, "output file, - for stdout");

    ConvertArgs conv_args;
    auto* conv_cmd = app.add_subcommand("convert", "rewrite a matrix in another storage form");
    conv_cmd->add_option("in", conv_args.in, "input (.mtx)")->required();
    conv_cmd->add_option("out", conv_args.out, "output (.mtx), - for stdout");
    conv_cmd->add_option("--to", conv_args.to, "coo, csr or dense")->required();
    conv_cmd->add_option("--field", conv_args.field, "zp:<p> or int");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "time an operation over a size grid");
    bench_cmd->add_option("--op", bench_args.op, "mul or spmv")->check(CLI::IsMember({"mul", "spmv"}));
    bench_cmd->add_option("--sizes", bench_args.sizes, "lo:hi:*k or lo:hi:+k")->required();
    bench_cmd->add_option("--reps", bench_args.reps, "timed repetitions")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--warmup", bench_args.warmup, "untimed warm-up runs");
    bench_cmd->add_option("--field", bench_args.field, "zp:<p> (default: largest 26-bit prime)");
    bench_cmd->add_option("--series", bench_args.series, "methods or formats to time");
    bench_cmd->add_option("--csv", bench_args.csv, "CSV output, - for stdout");
    bench_cmd->add_option("--gnuplot", bench_args.gnuplot, "gnuplot script output");

    TuneArgs tune_args;
    auto* tune_cmd = app.add_subcommand("tune", "fit the recursion crossover and store it");
    tune_cmd->add_option("--op", tune_args.op, "mul")->check(CLI::IsMember({"mul"}));
    tune_cmd->add_option("--sizes", tune_args.sizes, "lo:hi:*k or lo:hi:+k")->required();
    tune_cmd->add_option("--reps", tune_args.reps, "timed repetitions")->check(CLI::PositiveNumber);
    tune_cmd->add_option("--warmup", tune_args.warmup, "untimed warm-up runs");
    tune_cmd->add_option("--field", tune_args.field, "zp:<p> (default: largest 26-bit prime)");
    tune_cmd->add_option("--out", tune_args.out, "config file to update")->required();
    tune_cmd->add_option("--csv", tune_args.csv, "also write the timings");

    RegressArgs reg_args;
    auto* reg_cmd = app.add_subcommand("regress", "compare timings against a baseline");
    reg_cmd->add_option("--baseline", reg_args.baseline, "baseline CSV")->required();
    reg_cmd->add_option("--current", reg_args.current, "current CSV")->required();
    reg_cmd->add_option("--tol", reg_args.tol, "relative tolerance")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    try {
        if (*mul_cmd) return cmd_mul(mul_args);
        if (*spmv_cmd) return cmd_spmv(spmv_args);
        if (*conv_cmd) return cmd_convert(conv_args);
        if (*bench_cmd) return cmd_bench(bench_args);
        if (*tune_cmd) return cmd_tune(tune_args);
        if (*reg_cmd) return cmd_regress(reg_args);
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDimension;
    } catch (const TunerError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kTuner;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    }
    return kParse;
}
