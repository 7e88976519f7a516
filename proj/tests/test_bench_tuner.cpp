#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "xla/bench.hpp"
#include "xla/bench_ops.hpp"
#include "xla/errors.hpp"
#include "xla/matmul.hpp"
#include "xla/tuner.hpp"

using namespace xla;

namespace {

PlotSeries curve(const std::string& name, const std::vector<std::size_t>& grid, const std::function<double(double)>& f) {
    PlotSeries s{name, {}};
    for (std::size_t n : grid) s.points.push_back({n, {f(static_cast<double>(n))}});
    return s;
}

std::vector<std::size_t> geometric(std::size_t lo, std::size_t hi, double ratio) {
    std::vector<std::size_t> g;
    for (double x = static_cast<double>(lo); x <= static_cast<double>(hi) + 0.5; x *= ratio) {
        const auto n = static_cast<std::size_t>(std::llround(x));
        if (g.empty() || n > g.back()) g.push_back(n);
    }
    return g;
}

std::size_t index_of(const std::vector<std::size_t>& grid, std::size_t n) {
    return static_cast<std::size_t>(std::find(grid.begin(), grid.end(), n) - grid.begin());
}

// First grid point where g < f, located directly from the closed forms.
std::size_t analytic_sign_change(const std::vector<std::size_t>& grid, const std::function<double(double)>& f,
                                 const std::function<double(double)>& g) {
    for (std::size_t n : grid)
        if (g(static_cast<double>(n)) < f(static_cast<double>(n))) return n;
    return grid.back();
}

std::string csv_of(const PlotData& d) {
    std::ostringstream out;
    write_csv(out, d);
    return out.str();
}

PlotData timings(const std::string& machine, std::vector<std::pair<std::size_t, double>> pts) {
    PlotData d;
    d.meta = {"mul", "zp:101", machine, "2026-01-01T00:00:00Z"};
    auto& s = d.add_series("base");
    for (auto [n, t] : pts) s.points.push_back({n, {t}});
    return d;
}

const auto f_base = [](double n) { return 2 * n * n * n; };
const auto g_rec = [](double n) { return 1000 * n * n + std::pow(n, 2.807); };

} // namespace

TEST_CASE("time_op") {
    int calls = 0;
    auto one = time_op([&] { ++calls; }, 1);
    CHECK(one.samples.size() == 1);
    CHECK(one.min == one.samples[0]);
    CHECK(one.median == one.samples[0]);
    CHECK(calls == 1);
    calls = 0;
    auto five = time_op([&] { ++calls; }, 5, 2);
    CHECK(five.samples.size() == 5);
    CHECK(calls == 7);
    CHECK(five.min <= five.median);
    CHECK_THROWS_AS(time_op([] {}, 0), std::invalid_argument);
    // Non-binding smoke check: a 5 ms sleep measures at least 5 ms.
    auto slept = time_op([] { std::this_thread::sleep_for(std::chrono::milliseconds(5)); }, 3);
    CHECK(slept.median >= 0.005);
    CHECK(summarize({3, 1, 2}).median == 2);
    CHECK(summarize({4, 1, 2, 3}).median == 2.5);
}

TEST_CASE("CSV emission") {
    PlotData d;
    d.meta = {"mul", "zp:101", "host/x86_64", "2026-01-01T00:00:00Z"};
    d.add_series("base").points.push_back({4, {0.001}});
    const std::string text = csv_of(d);
    CHECK(text ==
          "# op=mul\n# field=zp:101\n# machine=host/x86_64\n# timestamp=2026-01-01T00:00:00Z\n"
          "series,n,sample_idx,seconds\n"
          "\"base\",4,0,0.001\n");
    std::istringstream in(text);
    CHECK(read_csv(in) == d);

    SUBCASE("byte-exact round trip with awkward values") {
        PlotData e;
        e.meta = {"spmv", "zp:67108859", "m", "t"};
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(1e-9, 10);
        for (const std::string name : {"csr", "a \"quoted\", name", "hyb"}) {
            auto& s = e.add_series(name);
            for (std::size_t n = 1; n <= 64; n *= 4) {
                PlotPoint p{n, {}};
                for (int i = 0; i < 3; ++i) p.samples.push_back(u(rng));
                p.samples.push_back(0.1 + 0.2);
                s.points.push_back(p);
            }
        }
        const std::string once = csv_of(e);
        std::istringstream in2(once);
        const PlotData back = read_csv(in2);
        CHECK(back == e);
        CHECK(csv_of(back) == once);
    }

    SUBCASE("gnuplot script names each series once") {
        PlotData e = d;
        e.add_series("winograd").points.push_back({4, {0.002}});
        e.add_series("auto").points.push_back({4, {0.0015}});
        std::ostringstream gp;
        PlotStyle style;
        style.kind = PlotStyle::Kind::Gnuplot;
        style.title = "mul";
        write_gnuplot(gp, e, style, "out.csv");
        const std::string script = gp.str();
        for (const std::string name : {"base", "winograd", "auto"}) {
            const std::string title = "title \"" + name + "\"";
            const auto first = script.find(title);
            REQUIRE(first != std::string::npos);
            CHECK(script.find(title, first + 1) == std::string::npos);
        }
        CHECK(script.find("set logscale x") != std::string::npos);
    }

    SUBCASE("plot_emit writes files") {
        const auto dir = std::filesystem::temp_directory_path() / "xla_bench_test";
        std::filesystem::create_directories(dir);
        PlotStyle style;
        style.kind = PlotStyle::Kind::Gnuplot;
        plot_emit(d, style, dir / "t.csv");
        CHECK(read_csv_file(dir / "t.csv") == d);
        CHECK(std::filesystem::exists(dir / "t.gp"));
        CHECK_THROWS(plot_emit(d, style, dir / "missing" / "deeper" / "t.csv"));
        std::filesystem::remove_all(dir);
    }

    SUBCASE("invalid data and malformed CSV") {
        PlotData bad = d;
        bad.series[0].points.push_back({4, {1.0}});
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = d;
        bad.series[0].points[0].samples.clear();
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        for (const std::string& s : {
                 std::string("series,n,sample_idx,seconds\n\"a\",4,1,0.5\n"),   // index does not start at 0
                 std::string("series,n,idx,seconds\n"),                           // wrong header
                 std::string("series,n,sample_idx,seconds\n\"a\",x,0,0.5\n"),   // bad n
                 std::string("series,n,sample_idx,seconds\n\"a,4,0,0.5\n"),     // unterminated quote
             }) {
            std::istringstream bin(s);
            CHECK_THROWS_AS(read_csv(bin), ParseError);
        }
    }
}

TEST_CASE("regression_check") {
    SUBCASE("examples") {
        const RegressionBaseline base{timings("m", {{100, 1.0}})};
        auto r = regression_check(timings("m", {{100, 1.5}}), base, 0.2);
        CHECK(r.status == RegressionReport::Status::Fail);
        REQUIRE(r.entries.size() == 1);
        CHECK(r.entries[0].ratio == doctest::Approx(1.5));
        CHECK(regression_check(timings("m", {{100, 1.1}}), base, 0.2).status == RegressionReport::Status::Pass);
        auto other = regression_check(timings("other", {{100, 1.0}}), base, 0.2);
        CHECK(other.status == RegressionReport::Status::Indeterminate);
        CHECK_FALSE(other.machines_match);
        CHECK_THROWS_AS(regression_check(timings("m", {{200, 1.0}}), base, 0.2), std::invalid_argument);
        CHECK(to_string(RegressionReport::Status::Fail) == "FAIL");
        std::ostringstream out;
        r.print(out);
        CHECK(out.str().find("FAIL") != std::string::npos);
    }
    SUBCASE("PASS/FAIL matrix follows the tolerance rule") {
        const RegressionBaseline base{timings("m", {{8, 1.0}, {16, 2.0}, {32, 4.0}})};
        for (double tol : {0.0, 0.05, 0.2, 1.0}) {
            for (double factor : {0.5, 1.0, 1.04, 1.1, 1.5, 2.5}) {
                const auto r = regression_check(timings("m", {{8, factor}, {16, 2.0}, {32, 4.0}}), base, tol);
                const bool expect = factor <= 1.0 * (1 + tol);
                CHECK(r.entries[0].pass == expect);
                CHECK((r.status == RegressionReport::Status::Pass) == expect);
            }
        }
    }
    SUBCASE("monotone in the current samples") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.5, 2.0);
        const RegressionBaseline base{timings("m", {{8, 1.0}, {16, 1.0}, {32, 1.0}})};
        for (int t = 0; t < 200; ++t) {
            PlotData cur = timings("m", {{8, u(rng)}, {16, u(rng)}, {32, u(rng)}});
            const auto before = regression_check(cur, base, 0.2);
            for (auto& p : cur.series[0].points) p.samples[0] *= 1.0 + u(rng);
            const auto after = regression_check(cur, base, 0.2);
            for (std::size_t i = 0; i < 3; ++i)
                if (!before.entries[i].pass) REQUIRE_FALSE(after.entries[i].pass);
            if (before.status == RegressionReport::Status::Fail) REQUIRE(after.status == RegressionReport::Status::Fail);
        }
    }
    SUBCASE("op and field must agree") {
        const RegressionBaseline base{timings("m", {{8, 1.0}})};
        PlotData cur = timings("m", {{8, 1.0}});
        cur.meta.field = "zp:7";
        CHECK_THROWS_AS(regression_check(cur, base, 0.1), std::invalid_argument);
    }
}

TEST_CASE("tune_threshold on synthetic curves") {
    for (double ratio : {2.0, std::sqrt(2.0), 1.25}) {
        const auto grid = geometric(8, 4096, ratio);
        CAPTURE(grid.size());
        const std::size_t expected = analytic_sign_change(grid, f_base, g_rec);
        SUBCASE("noiseless") {
            const auto r = tune_threshold(curve("base", grid, f_base), curve("winograd", grid, g_rec));
            CHECK(r.crossing == TuneResult::Crossing::Found);
            const long d = static_cast<long>(index_of(grid, r.threshold)) - static_cast<long>(index_of(grid, expected));
            CHECK(std::abs(d) <= 1);
            CHECK(r.table.lookup(grid.front()) == "base");
            CHECK(r.table.lookup(grid.back()) == "winograd");
            CHECK(r.table.boundaries() == std::vector<std::size_t>{r.threshold});
            CHECK(r.controller_threshold() == (r.threshold + 1) / 2);
        }
        SUBCASE("10% noise and one 10x outlier") {
            std::mt19937_64 rng(42);
            std::uniform_real_distribution<double> noise(0.9, 1.1);
            for (int trial = 0; trial < 20; ++trial) {
                auto base = curve("base", grid, [&](double n) { return f_base(n) * noise(rng); });
                auto rec = curve("winograd", grid, [&](double n) { return g_rec(n) * noise(rng); });
                auto& victim = (trial % 2 ? base : rec).points[rng() % grid.size()];
                victim.samples[0] *= 10;
                const auto r = tune_threshold(base, rec);
                const long d =
                    static_cast<long>(index_of(grid, r.threshold)) - static_cast<long>(index_of(grid, expected));
                REQUIRE(std::abs(d) <= 2);
            }
        }
    }
}

TEST_CASE("tune_threshold edge rules") {
    const auto grid = geometric(8, 1024, 2);
    SUBCASE("recursive never wins") {
        const auto r = tune_threshold(curve("base", grid, f_base),
                                      curve("winograd", grid, [](double n) { return 3 * n * n * n; }));
        CHECK(r.crossing == TuneResult::Crossing::RecursiveNeverWins);
        CHECK(r.threshold == grid.back());
        CHECK(r.table.boundaries().empty());
        CHECK(r.table.lookup(grid.back()) == "base");
        // A cubic is outside the recursive model; on a wide grid its fit
        // crosses the base fit although the data never does.
        const auto wide = geometric(8, 4096, std::sqrt(2.0));
        const auto w = tune_threshold(curve("base", wide, f_base),
                                      curve("winograd", wide, [](double n) { return 3 * n * n * n; }));
        CHECK(w.crossing == TuneResult::Crossing::RecursiveNeverWins);
        CHECK(w.threshold == wide.back());
    }
    SUBCASE("recursive always wins") {
        const auto r = tune_threshold(curve("base", grid, f_base),
                                      curve("winograd", grid, [](double n) { return std::pow(n, std::log2(7.0)); }));
        CHECK(r.crossing == TuneResult::Crossing::RecursiveAlwaysWins);
        CHECK(r.threshold == grid.front());
    }
    SUBCASE("identical series") {
        const auto r = tune_threshold(curve("base", grid, f_base), curve("winograd", grid, f_base));
        CHECK(r.crossing == TuneResult::Crossing::Identical);
        CHECK(r.threshold == grid.front());
        CHECK(r.table.lookup(grid.back()) == "base");
    }
    SUBCASE("errors") {
        const std::vector<std::size_t> small{8, 16, 32};
        CHECK_THROWS_AS(tune_threshold(curve("base", small, f_base), curve("winograd", small, g_rec)), TunerError);
        std::vector<std::size_t> other = grid;
        other.back() += 1;
        CHECK_THROWS_AS(tune_threshold(curve("base", grid, f_base), curve("winograd", other, g_rec)), TunerError);
        try {
            tune_threshold(curve("flatline", grid, [](double) { return 0.0; }), curve("winograd", grid, g_rec));
            FAIL("degenerate fit accepted");
        } catch (const TunerError& e) {
            CHECK(std::string(e.what()).find("flatline") != std::string::npos);
        }
    }
    SUBCASE("store") {
        const auto r = tune_threshold(curve("base", grid, f_base), curve("winograd", grid, g_rec));
        TunedConfig cfg;
        r.store(cfg);
        CHECK(cfg.get_size("mul.threshold") == r.controller_threshold());
        CHECK(cfg.get_double("mul.crossover").has_value());
    }
}

TEST_CASE("fit_curve recovers exact coefficients") {
    const auto grid = geometric(16, 2048, 2);
    const auto fit = fit_curve(curve("s", grid, [](double n) { return 3e-9 * n * n * n + 2e-6 * n * n; }), 3.0);
    CHECK(fit.lead == doctest::Approx(3e-9).epsilon(1e-6));
    CHECK(fit.square == doctest::Approx(2e-6).epsilon(1e-6));
    for (double r : fit.residuals) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("select_method") {
    SelectionGrid grid{{16, 32, 64, 96, 128, 192, 256}, {"default"}};
    auto synthetic = [](std::function<double(double)> t) {
        return [t](const SelectionGrid& g) {
            PlotData d;
            auto& s = d.add_series("default");
            for (std::size_t n : g.sizes) s.points.push_back({n, {t(static_cast<double>(n))}});
            return d;
        };
    };
    auto a = synthetic([](double n) { return n; });
    auto b = synthetic([](double n) { return 50 + n / 2; }); // equal at n = 100
    SUBCASE("single candidate") {
        const auto sel = select_method("mul", {"base"}, grid, [&](const std::string&, const SelectionGrid& g) { return a(g); });
        for (std::size_t n : {1, 16, 100, 1000}) CHECK(sel.table().lookup(n) == "base");
        CHECK(sel.table().points().size() == grid.sizes.size());
    }
    SUBCASE("two candidates split near 100") {
        const auto sel = select_method("mul", {"base", "winograd"}, grid, [&](const std::string& c, const SelectionGrid& g) {
            return c == "base" ? a(g) : b(g);
        });
        CHECK(sel.table().boundaries() == std::vector<std::size_t>{128});
        CHECK(sel.table().lookup(96) == "base");
        CHECK(sel.table().lookup(128) == "winograd");
        TunedConfig cfg;
        sel.store(cfg);
        CHECK(cfg.get("mul.methods") == sel.table().serialize());
    }
    SUBCASE("failing candidates are excluded") {
        const auto sel = select_method("mul", {"broken", "base"}, grid, [&](const std::string& c, const SelectionGrid& g) {
            if (c == "broken") throw std::runtime_error("boom");
            return a(g);
        });
        CHECK(sel.excluded == std::vector<std::string>{"broken"});
        CHECK(sel.warnings.size() == 1);
        CHECK_THROWS_AS(select_method("mul", {"x", "y"}, grid,
                                      [](const std::string&, const SelectionGrid&) -> PlotData { throw std::runtime_error("no"); }),
                        TunerError);
        // Missing a cell counts as a failure.
        const auto partial = select_method("mul", {"short", "base"}, grid, [&](const std::string& c, const SelectionGrid& g) {
            if (c == "short") return a(SelectionGrid{{16}, {"default"}});
            return a(g);
        });
        CHECK(partial.excluded == std::vector<std::string>{"short"});
    }
    SUBCASE("forced base case ignores the table") {
        const MethodTable table({{1, "winograd"}});
        PrimeField f(101);
        DenseMatrix x(f, 64, 64), y(f, 64, 64), z(f, 64, 64);
        MulHelper forced;
        forced.method = Method::BaseCase;
        forced.table = &table;
        mul(z, x, y, forced);
        CHECK(forced.counters.recursive_steps == 0);
        MulHelper autoh;
        autoh.table = &table;
        autoh.threshold = 8;
        mul(z, x, y, autoh);
        CHECK(autoh.counters.recursive_steps > 0);
    }
}

TEST_CASE("size grids and bench drivers") {
    CHECK(parse_size_grid("4:16:*2") == std::vector<std::size_t>{4, 8, 16});
    CHECK(parse_size_grid("4:20:*2") == std::vector<std::size_t>{4, 8, 16});
    CHECK(parse_size_grid("10:30:+10") == std::vector<std::size_t>{10, 20, 30});
    CHECK(parse_size_grid("7") == std::vector<std::size_t>{7});
    for (const char* bad : {"", "0", "4:2:*2", "4:16:*1", "4:16:/2", "a:b:*2", "4:16", "4:16:*"})
        CHECK_THROWS_AS(parse_size_grid(bad), std::invalid_argument);

    PrimeField f(65537);
    BenchOptions o;
    o.repetitions = 2;
    o.warmup = 0;
    const auto d = bench_mul(f, {4, 8, 16}, {"base", "winograd", "auto"}, o);
    CHECK(d.meta.op == "mul");
    CHECK(d.meta.field == "zp:65537");
    CHECK(d.series.size() == 3);
    CHECK_NOTHROW(d.validate());
    CHECK(d.find("winograd")->points[2].samples.size() == 2);
    const auto s = bench_spmv(f, {8, 32}, {"coo", "csr", "hyb"}, o);
    CHECK(s.meta.op == "spmv");
    CHECK_NOTHROW(s.validate());
    const auto t = tune_mul(f, {8, 16, 32, 64}, o);
    CHECK(t.result.threshold >= 8);
    CHECK(t.result.threshold <= 64);
}
