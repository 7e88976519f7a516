#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xla/bench.hpp"
#include "xla/field.hpp"
#include "xla/tuner.hpp"

namespace xla {

/**
 * Size grids: `lo:hi:*k` gives lo, lo*k, lo*k^2, ... and `lo:hi:+k` gives
 * lo, lo+k, ..., both capped at hi. A bare `n` is the single size n.
 * Throws std::invalid_argument on malformed input.
 */
std::vector<std::size_t> parse_size_grid(const std::string& text);

struct BenchOptions {
    std::size_t repetitions = 3;
    std::size_t warmup = 1;
    std::uint64_t seed = 1;
};

// Dense n x n x n products over `field`. Series names are method tags:
// "base" (forced base case), "winograd" (one Strassen-Winograd level on top
// of the base case) and "auto" (tuned controller).
PlotData bench_mul(const PrimeField& field, const std::vector<std::size_t>& sizes,
                   const std::vector<std::string>& series, const BenchOptions& options = {});

// Sparse n x n apply, about 8 nonzeros per row with half of them +-1.
// Series names are formats: "coo", "csr", "hyb".
PlotData bench_spmv(const PrimeField& field, const std::vector<std::size_t>& sizes,
                    const std::vector<std::string>& series, const BenchOptions& options = {});

struct MulTuning {
    PlotData data;
    TuneResult result;
};

// Benchmarks "base" and "winograd" on the grid and fits the crossover.
MulTuning tune_mul(const PrimeField& field, const std::vector<std::size_t>& sizes, const BenchOptions& options = {});

} // namespace xla
