#include "xla/tuner.hpp"

#include <algorithm>
#include <cmath>

#include "xla/errors.hpp"

namespace xla {

namespace {

constexpr double kHuber = 1.345;
constexpr int kMaxIterations = 100;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double log2_7() { return std::log2(7.0); }

} // namespace

double CurveFit::operator()(double n) const { return lead * std::pow(n, exponent) + square * n * n; }

CurveFit fit_curve(const PlotSeries& series, double exponent) {
    const std::size_t npts = series.points.size();
    CurveFit fit;
    fit.series = series.name;
    fit.exponent = exponent;

    std::vector<double> u(npts), v(npts), y(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const double n = static_cast<double>(series.points[i].x);
        y[i] = series.points[i].median();
        if (!(y[i] > 0) || !std::isfinite(y[i])) {
            throw TunerError("degenerate fit for series '" + series.name + "': nonpositive median timing at n=" +
                             std::to_string(series.points[i].x));
        }
        // Relative least squares: every row is divided by its median.
        u[i] = std::pow(n, exponent) / y[i];
        v[i] = n * n / y[i];
    }
    // Column scaling keeps the 2x2 system well conditioned.
    double su = 0, sv = 0;
    for (std::size_t i = 0; i < npts; ++i) {
        su += u[i] * u[i];
        sv += v[i] * v[i];
    }
    su = std::sqrt(su);
    sv = std::sqrt(sv);
    if (!(su > 0) || !(sv > 0)) throw TunerError("degenerate fit for series '" + series.name + "'");

    std::vector<double> w(npts, 1.0), r(npts);
    double a = 0, b = 0;
    for (int it = 0; it < kMaxIterations; ++it) {
        double guu = 0, guv = 0, gvv = 0, gu1 = 0, gv1 = 0;
        for (std::size_t i = 0; i < npts; ++i) {
            const double ui = u[i] / su, vi = v[i] / sv;
            guu += w[i] * ui * ui;
            guv += w[i] * ui * vi;
            gvv += w[i] * vi * vi;
            gu1 += w[i] * ui;
            gv1 += w[i] * vi;
        }
        const double det = guu * gvv - guv * guv;
        if (!(std::abs(det) > 1e-12 * guu * gvv)) {
            throw TunerError("degenerate fit for series '" + series.name + "': singular normal equations");
        }
        const double na = (gu1 * gvv - gv1 * guv) / det / su;
        const double nb = (gv1 * guu - gu1 * guv) / det / sv;
        const bool settled = it > 0 && std::abs(na - a) <= 1e-13 * std::abs(na) && std::abs(nb - b) <= 1e-13 * std::abs(nb);
        a = na;
        b = nb;
        for (std::size_t i = 0; i < npts; ++i) r[i] = a * u[i] + b * v[i] - 1.0;
        if (settled) break;

        std::vector<double> absr(npts);
        std::transform(r.begin(), r.end(), absr.begin(), [](double x) { return std::abs(x); });
        const double scale = 1.4826 * median(absr);
        if (scale < 1e-12) break;
        for (std::size_t i = 0; i < npts; ++i) {
            w[i] = absr[i] <= kHuber * scale ? 1.0 : kHuber * scale / absr[i];
        }
    }
    fit.lead = a;
    fit.square = b;
    fit.residuals = r;
    fit.weights = w;
    return fit;
}

std::size_t TuneResult::controller_threshold() const {
    if (crossing == Crossing::RecursiveNeverWins) return threshold;
    return std::max<std::size_t>(1, (threshold + 1) / 2);
}

void TuneResult::store(TunedConfig& config) const {
    config.set("mul.threshold", std::to_string(controller_threshold()));
    config.set("mul.crossover", std::to_string(threshold));
}

std::string to_string(TuneResult::Crossing c) {
    switch (c) {
    case TuneResult::Crossing::Found: return "found";
    case TuneResult::Crossing::RecursiveNeverWins: return "recursive-never-wins";
    case TuneResult::Crossing::RecursiveAlwaysWins: return "recursive-always-wins";
    case TuneResult::Crossing::Identical: return "identical";
    }
    return "found";
}

TuneResult tune_threshold(const PlotSeries& base, const PlotSeries& recursive) {
    if (base.points.size() < 4 || recursive.points.size() < 4) {
        throw TunerError("tune_threshold: need at least 4 grid points, got " +
                         std::to_string(std::min(base.points.size(), recursive.points.size())));
    }
    if (base.points.size() != recursive.points.size()) throw TunerError("tune_threshold: series grids differ");
    std::vector<std::size_t> grid;
    for (std::size_t i = 0; i < base.points.size(); ++i) {
        if (base.points[i].x != recursive.points[i].x) throw TunerError("tune_threshold: series grids differ");
        if (base.points[i].samples.empty() || recursive.points[i].samples.empty()) {
            throw TunerError("tune_threshold: grid point without samples");
        }
        if (i && grid.back() >= base.points[i].x) throw TunerError("tune_threshold: grid is not strictly increasing");
        grid.push_back(base.points[i].x);
    }

    TuneResult res;
    res.base_fit = fit_curve(base, 3.0);
    res.recursive_fit = fit_curve(recursive, log2_7());

    const bool identical = std::equal(base.points.begin(), base.points.end(), recursive.points.begin(),
                                      [](const PlotPoint& p, const PlotPoint& q) { return p.median() == q.median(); });
    // Measured dominance settles the edge cases before the fit is consulted,
    // since a misspecified model can cross where the data never does.
    bool rec_never_below = true, rec_always_below = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double b = base.points[i].median(), r = recursive.points[i].median();
        if (r < b) rec_never_below = false;
        if (!(r < b)) rec_always_below = false;
    }
    auto diff = [&](double n) { return res.recursive_fit(n) - res.base_fit(n); };

    if (identical) {
        res.crossing = TuneResult::Crossing::Identical;
        res.threshold = grid.front();
    } else if (rec_never_below) {
        res.crossing = TuneResult::Crossing::RecursiveNeverWins;
        res.threshold = grid.back();
    } else if (rec_always_below || diff(static_cast<double>(grid.front())) < 0) {
        res.crossing = TuneResult::Crossing::RecursiveAlwaysWins;
        res.threshold = grid.front();
        res.crossover = static_cast<double>(grid.front());
    } else {
        res.crossing = TuneResult::Crossing::RecursiveNeverWins;
        res.threshold = grid.back();
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            double lo = static_cast<double>(grid[i]), hi = static_cast<double>(grid[i + 1]);
            if (!(diff(lo) >= 0 && diff(hi) < 0)) continue;
            // Invariant: diff(lo) >= 0 > diff(hi).
            for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (diff(mid) < 0 ? hi : lo) = mid;
            }
            res.crossover = hi;
            res.crossing = TuneResult::Crossing::Found;
            // Nearest grid point; a tie goes to the larger size (base preferred).
            const double dl = hi - static_cast<double>(grid[i]);
            const double du = static_cast<double>(grid[i + 1]) - hi;
            res.threshold = dl < du ? grid[i] : grid[i + 1];
            break;
        }
    }

    std::vector<std::pair<std::size_t, std::string>> points;
    const bool recursion_wins = res.crossing == TuneResult::Crossing::Found ||
                                res.crossing == TuneResult::Crossing::RecursiveAlwaysWins;
    for (std::size_t x : grid) points.emplace_back(x, recursion_wins && x >= res.threshold ? "winograd" : "base");
    res.table = MethodTable(std::move(points));
    return res;
}

const MethodTable& MethodSelection::table(const std::string& matrix_class) const {
    auto it = tables.find(matrix_class);
    if (it == tables.end()) throw std::out_of_range("no method table for class '" + matrix_class + "'");
    return it->second;
}

void MethodSelection::store(TunedConfig& config) const {
    for (const auto& [cls, t] : tables) {
        config.set(cls == "default" ? solution + ".methods" : solution + ".methods." + cls, t.serialize());
    }
}

MethodSelection select_method(const std::string& solution, const std::vector<std::string>& candidates,
                              const SelectionGrid& grid, const BenchRunner& runner) {
    if (candidates.empty()) throw TunerError("select_method: no candidates");
    if (grid.sizes.empty() || grid.classes.empty()) throw TunerError("select_method: empty grid");

    MethodSelection sel;
    sel.solution = solution;
    struct Run {
        std::string name;
        PlotData data;
    };
    std::vector<Run> runs;
    for (const auto& c : candidates) {
        try {
            PlotData d = runner(c, grid);
            for (const auto& cls : grid.classes) {
                const PlotSeries* s = d.find(cls);
                if (!s) throw std::runtime_error("no series for class '" + cls + "'");
                for (std::size_t n : grid.sizes) {
                    const PlotPoint* p = s->at(n);
                    if (!p || p->samples.empty()) {
                        throw std::runtime_error("no timing for class '" + cls + "' at n=" + std::to_string(n));
                    }
                }
            }
            runs.push_back({c, std::move(d)});
        } catch (const std::exception& e) {
            sel.excluded.push_back(c);
            sel.warnings.push_back("candidate '" + c + "' excluded: " + e.what());
        }
    }
    if (runs.empty()) throw TunerError("select_method: every candidate for '" + solution + "' failed");

    std::vector<std::size_t> sizes = grid.sizes;
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    for (const auto& cls : grid.classes) {
        std::vector<std::pair<std::size_t, std::string>> points;
        for (std::size_t n : sizes) {
            const Run* best = nullptr;
            double best_t = 0;
            for (const auto& r : runs) {
                const double t = r.data.find(cls)->at(n)->median();
                if (!best || t < best_t) {
                    best = &r;
                    best_t = t;
                }
            }
            points.emplace_back(n, best->name);
        }
        sel.tables.emplace(cls, MethodTable(std::move(points)));
    }
    return sel;
}

} // namespace xla
