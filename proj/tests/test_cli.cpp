#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "xla/bench.hpp"
#include "xla/matrix_market.hpp"

namespace fs = std::filesystem;
using namespace xla;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

fs::path workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("xla_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// Runs the CLI with stderr discarded; captures stdout and the exit status.
Run xla_run(const std::string& args) {
    const std::string cmd = "cd '" + workdir().string() + "' && '" XLA_CLI_PATH "' " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

template <class T>
void put(const std::string& name, const T& m) {
    std::ofstream out(workdir() / name, std::ios::binary);
    mm_write(out, m);
}

void put_text(const std::string& name, const std::string& text) { std::ofstream(workdir() / name, std::ios::binary) << text; }

} // namespace

TEST_CASE("mul") {
    PrimeField f(101);
    oracle::Rng rng(1);
    const DenseMatrix b = rng.matrix(f, 5, 7);
    put("I.mtx", convert<SparseCOO>(DenseMatrix::identity(f, 5)));
    put("B.mtx", b.view());
    SUBCASE("identity times B reproduces B") {
        const auto r = xla_run("mul I.mtx B.mtx -o C.mtx");
        CHECK(r.code == 0);
        CHECK(slurp(workdir() / "C.mtx") == slurp(workdir() / "B.mtx"));
        CHECK(xla_run("mul I.mtx B.mtx -o -").out == slurp(workdir() / "B.mtx"));
    }
    SUBCASE("forced base and winograd agree byte for byte") {
        const DenseMatrix a = rng.matrix(f, 37, 41), c = rng.matrix(f, 41, 29);
        put("A.mtx", a.view());
        put("C.mtx", c.view());
        const auto base = xla_run("mul A.mtx C.mtx --method base");
        const auto wino = xla_run("mul A.mtx C.mtx --method winograd --threshold 1");
        const auto aut = xla_run("mul A.mtx C.mtx --threshold 4");
        REQUIRE(base.code == 0);
        CHECK(base.out == wino.out);
        CHECK(base.out == aut.out);
        std::ostringstream expect;
        mm_write(expect, oracle::product(a, c).view());
        CHECK(base.out == expect.str());
    }
    SUBCASE("alpha and beta") {
        const DenseMatrix a = rng.matrix(f, 4, 5), c0 = rng.matrix(f, 4, 7);
        put("A.mtx", a.view());
        put("C0.mtx", c0.view());
        const auto r = xla_run("mul A.mtx B.mtx --alpha -3 --beta 5 -c C0.mtx");
        REQUIRE(r.code == 0);
        std::ostringstream expect;
        mm_write(expect, oracle::gemm(c0, a, b, f.normalize(-3), 5).view());
        CHECK(r.out == expect.str());
    }
    SUBCASE("integers") {
        const auto a = rng.integer_matrix(3, 4, 200), c = rng.integer_matrix(4, 2, 200);
        put("IA.mtx", a);
        put("IB.mtx", c);
        const auto r = xla_run("mul IA.mtx IB.mtx --field int");
        REQUIRE(r.code == 0);
        std::ostringstream expect;
        mm_write(expect, oracle::int_gemm(a, c));
        CHECK(r.out == expect.str());
    }
    SUBCASE("errors") {
        CHECK(xla_run("mul B.mtx B.mtx").code == 2);
        put_text("bad.mtx", "%%MatrixMarket matrix coordinate integer general\n%%field: modular 101\n2 2 1\n3 1 1\n");
        CHECK(xla_run("mul bad.mtx B.mtx").code == 1);
        CHECK(xla_run("mul I.mtx B.mtx --field zp:7").code == 1);
        CHECK(xla_run("mul I.mtx missing.mtx").code == 1);
        CHECK(xla_run("mul I.mtx B.mtx --method fastest").code == 1);
        CHECK(xla_run("frobnicate").code == 1);
    }
}

TEST_CASE("spmv") {
    PrimeField f(97);
    oracle::Rng rng(2);
    const auto a = rng.sparse(f, 30, 20, 0.1, 0.5);
    const DenseMatrix xr = rng.matrix(f, 20, 1), xl = rng.matrix(f, 30, 2);
    put("S.mtx", a);
    put("xr.mtx", xr.view());
    put("xl.mtx", xl.view());
    const DenseMatrix d = to_dense(a);
    for (const char* fmt : {"auto", "coo", "csr", "hyb"}) {
        CAPTURE(fmt);
        std::ostringstream right, left;
        mm_write(right, oracle::apply(d, DenseMatrix(f, 30, 1), xr, Side::Right, 1, 0).view());
        mm_write(left, oracle::apply(d, DenseMatrix(f, 20, 2), xl, Side::Left, 1, 0).view());
        const auto r = xla_run(std::string("spmv S.mtx xr.mtx --format ") + fmt);
        CHECK(r.code == 0);
        CHECK(r.out == right.str());
        CHECK(xla_run(std::string("spmv S.mtx xl.mtx --side left --format ") + fmt).out == left.str());
    }
    CHECK(xla_run("spmv S.mtx xl.mtx").code == 2);
}

TEST_CASE("convert round trips") {
    PrimeField f(13);
    oracle::Rng rng(3);
    const DenseMatrix d = rng.matrix(f, 6, 9);
    put("D.mtx", d.view());
    REQUIRE(xla_run("convert D.mtx D.csr.mtx --to csr").code == 0);
    REQUIRE(xla_run("convert D.csr.mtx D2.mtx --to dense").code == 0);
    CHECK(slurp(workdir() / "D2.mtx") == slurp(workdir() / "D.mtx"));
    REQUIRE(xla_run("convert D.csr.mtx D.coo.mtx --to coo").code == 0);
    CHECK(slurp(workdir() / "D.coo.mtx") == slurp(workdir() / "D.csr.mtx"));
    CHECK(xla_run("convert D.mtx --to dense").out == slurp(workdir() / "D.mtx"));
    CHECK(xla_run("convert D.mtx X.mtx --to bcsr").code == 1);
}

TEST_CASE("bench, regress and tune") {
    SUBCASE("bench expands the size grid") {
        const auto r = xla_run("bench --op mul --sizes 4:16:*2 --reps 2 --csv b.csv --gnuplot b.gp");
        REQUIRE(r.code == 0);
        const PlotData d = read_csv_file(workdir() / "b.csv");
        CHECK(d.meta.op == "mul");
        for (const auto& s : d.series) {
            REQUIRE(s.points.size() == 3);
            CHECK(s.points[0].x == 4);
            CHECK(s.points[1].x == 8);
            CHECK(s.points[2].x == 16);
            CHECK(s.points[2].samples.size() == 2);
        }
        CHECK(slurp(workdir() / "b.gp").find("b.csv") != std::string::npos);
        CHECK(xla_run("bench --op spmv --sizes 8:32:+8 --reps 1").code == 0);
        CHECK(xla_run("bench --sizes 4:2:*2").code == 1);
    }
    SUBCASE("regress") {
        PlotData base;
        base.meta = {"mul", "zp:101", "m", "t0"};
        base.add_series("base").points = {{8, {1.0}}, {16, {2.0}}};
        PlotData slow = base, other = base;
        slow.series[0].points[1].samples = {3.0};
        other.meta.machine = "elsewhere";
        auto save = [](const std::string& name, const PlotData& d) {
            std::ofstream out(workdir() / name, std::ios::binary);
            write_csv(out, d);
        };
        save("base.csv", base);
        save("slow.csv", slow);
        save("other.csv", other);
        CHECK(xla_run("regress --baseline base.csv --current base.csv").code == 0);
        CHECK(xla_run("regress --baseline base.csv --current slow.csv --tol 0.2").code == 3);
        CHECK(xla_run("regress --baseline base.csv --current slow.csv --tol 0.6").code == 0);
        CHECK(xla_run("regress --baseline base.csv --current other.csv").code == 3);
        put_text("broken.csv", "series,n\n");
        CHECK(xla_run("regress --baseline base.csv --current broken.csv").code == 1);
    }
    SUBCASE("tune writes the config") {
        const auto r = xla_run("tune --op mul --sizes 8:64:*2 --reps 1 --out tuned.conf");
        REQUIRE(r.code == 0);
        const std::string conf = slurp(workdir() / "tuned.conf");
        CHECK(conf.find("mul.threshold = ") != std::string::npos);
        CHECK(conf.find("mul.methods = ") != std::string::npos);
        CHECK(xla_run("tune --op mul --sizes 8:32:*2 --out t.conf").code == 4); // too few points
    }
}

TEST_CASE("cleanup") { fs::remove_all(workdir()); }
