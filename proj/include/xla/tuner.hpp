#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "xla/bench.hpp"
#include "xla/config.hpp"
#include "xla/method_table.hpp"

namespace xla {

// t(n) = lead * n^exponent + square * n^2, fitted to the point medians.
struct CurveFit {
    std::string series;
    double exponent = 3;
    double lead = 0;
    double square = 0;
    std::vector<double> residuals; // (fit - median) / median per grid point
    std::vector<double> weights;   // final robust weights

    double operator()(double n) const;
};

struct TuneResult {
    enum class Crossing {
        Found,               // the fitted curves cross inside the grid
        RecursiveNeverWins,  // threshold is the largest grid point
        RecursiveAlwaysWins, // threshold is the smallest grid point
        Identical,           // equal medians everywhere; threshold is the smallest grid point
    };

    std::size_t threshold = 0;    // crossover, a measured grid point
    double crossover = 0;         // unrounded root of the fitted difference (0 if none)
    Crossing crossing = Crossing::Found;
    CurveFit base_fit;
    CurveFit recursive_fit;
    MethodTable table;            // "base" / "winograd" per grid point

    // Controller threshold reproducing the crossover: a step is taken when
    // min(m,k,n) >= 2*t, so t = ceil(threshold / 2).
    std::size_t controller_threshold() const;
    // Writes mul.threshold and mul.crossover.
    void store(TunedConfig& config) const;
};

std::string to_string(TuneResult::Crossing c);

/**
 * Fits base to a*n^3 + b*n^2 and recursive to c*n^log2(7) + e*n^2 by
 * relative least squares with Huber reweighting, then bisects the fitted
 * difference for the smallest size where recursion becomes faster.
 * Medians where recursion is never faster (or always faster) settle the
 * edge cases directly. Both series must share a grid of at least 4 points.
 * Throws TunerError.
 */
TuneResult tune_threshold(const PlotSeries& base, const PlotSeries& recursive);

// Fixed-exponent fit used by tune_threshold; throws TunerError naming the
// series when the normal equations are singular.
CurveFit fit_curve(const PlotSeries& series, double exponent);

struct SelectionGrid {
    std::vector<std::size_t> sizes;
    std::vector<std::string> classes{"default"};
};

// Benchmarks one candidate on the grid: one series per class, one point per size.
using BenchRunner = std::function<PlotData(const std::string& candidate, const SelectionGrid& grid)>;

struct MethodSelection {
    std::string solution;
    std::map<std::string, MethodTable> tables; // by matrix class
    std::vector<std::string> excluded;         // candidates whose run failed
    std::vector<std::string> warnings;

    const MethodTable& table(const std::string& matrix_class = "default") const;
    // <solution>.methods for the default class, <solution>.methods.<class> otherwise.
    void store(TunedConfig& config) const;
};

/**
 * Runs every candidate and keeps, per (class, size) cell, the one with the
 * smallest median. Ties go to the earlier candidate. A candidate whose runner
 * throws or whose output misses a cell is excluded with a warning; TunerError
 * when none is left.
 */
MethodSelection select_method(const std::string& solution, const std::vector<std::string>& candidates,
                              const SelectionGrid& grid, const BenchRunner& runner);

} // namespace xla
