#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "xla/dense.hpp"
#include "xla/method_table.hpp"

namespace xla {

enum class Method { Auto, BaseCase, Recursive };

std::string to_string(Method m);
// Accepts "auto", "base", "winograd" (also "recursive").
Method parse_method(const std::string& s);

struct MulCounters {
    std::size_t base_cases = 0;      // base-case products dispatched by the controller
    std::size_t recursive_steps = 0; // Strassen-Winograd levels executed
    std::size_t peel_updates = 0;    // boundary fix-ups for odd dimensions

    void reset() noexcept { *this = {}; }
};

/**
 * Caller-visible strategy for `mul`.
 *
 * - BaseCase: never recurse.
 * - Recursive: the top-level call takes a Winograd step; deeper levels follow
 *   the threshold rule.
 * - Auto: threshold rule at every level. Without an explicit threshold the
 *   tuned method table or tuned threshold is used, else the built-in default.
 *
 * Threshold rule: a Winograd step is taken when the half-size sub-products
 * would still have every dimension >= threshold, i.e. min(m,k,n) >= 2*threshold.
 * For square power-of-two sizes the base case therefore runs on blocks of
 * size exactly threshold (rounded up to a power of two).
 */
struct MulHelper {
    static constexpr std::size_t kDefaultThreshold = 64;

    Method method = Method::Auto;
    std::optional<std::size_t> threshold;
    Element alpha = 1;
    Element beta = 0;
    // When set, overrides the tuned table for Auto (ignored by forced methods).
    const MethodTable* table = nullptr;
    MulCounters counters;
};

// C <- alpha*A*B + beta*C. Rejects shape mismatch, mixed fields and C aliasing
// A or B.
void mul(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper& helper);
void mul(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper&& helper = {});

DenseMatrix mul(ConstMatrixView a, ConstMatrixView b, MulHelper& helper);
DenseMatrix mul(ConstMatrixView a, ConstMatrixView b, MulHelper&& helper = {});

// Classic triple loop with delayed reduction: at most field.max_accumulation()
// products are summed between reductions.
void base_case_gemm(MatrixView c, ConstMatrixView a, ConstMatrixView b, Element alpha, Element beta);

// One Strassen-Winograd level on (m,k,n) all >= 2. The seven sub-products go
// back through the controller with `helper`.
void winograd_step(MatrixView c, ConstMatrixView a, ConstMatrixView b, MulHelper& helper);

// y <- alpha*A*x + beta*y (Right) or alpha*A^T*x + beta*y (Left), through mul.
void apply_dense(ConstMatrixView a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
                 MulHelper helper = {});

} // namespace xla
