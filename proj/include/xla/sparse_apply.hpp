#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "xla/sparse.hpp"

namespace xla {

// Tallies from the instrumented kernels.
struct SpmvStats {
    std::size_t pattern_multiplications = 0; // field products in the +1/-1 passes
    std::size_t general_multiplications = 0; // field products in valued passes
    std::size_t reductions = 0;              // modular reductions of partial sums

    void reset() noexcept { *this = {}; }
};

// Row-compressed pattern with no value array; every stored entry means the same constant.
struct PatternCSR {
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;

    std::size_t nnz() const noexcept { return col_idx.size(); }
};

/**
 * A = plus_ones - minus_ones + general, with disjoint patterns. The general
 * part holds no entry equal to 1 or p-1.
 */
class SparseHYB {
public:
    SparseHYB(const PrimeField& field, std::size_t rows, std::size_t cols, PatternCSR plus, PatternCSR minus,
              SparseCSR general);

    const PrimeField& field() const noexcept { return general_.field(); }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return plus_.nnz() + minus_.nnz() + general_.nnz(); }

    const PatternCSR& plus_ones() const noexcept { return plus_; }
    const PatternCSR& minus_ones() const noexcept { return minus_; }
    const SparseCSR& general() const noexcept { return general_; }

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0) const;

private:
    std::size_t rows_, cols_;
    PatternCSR plus_, minus_;
    SparseCSR general_;
};

SparseHYB hyb_split(const SparseCSR& a);
SparseCSR to_csr(const SparseHYB& h);

template <>
SparseHYB from_csr<SparseHYB>(const SparseCSR& s);

// Kernels. Row sums are reduced after every `segment` unreduced terms
// (0 means field.max_accumulation()). `transpose`, when given, must be the exact
// transpose of `a` and turns Left applies into row-oriented Right applies.
void csr_apply(const SparseCSR& a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               const SparseCSR* transpose = nullptr, SpmvStats* stats = nullptr, std::size_t segment = 0);
void coo_apply(const SparseCOO& a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               SpmvStats* stats = nullptr);
void hyb_apply(const SparseHYB& h, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               const SparseHYB* transpose = nullptr, SpmvStats* stats = nullptr, std::size_t segment = 0);

enum class SpmvFormat { COO, CSR, HYB };

struct PlanOptions {
    bool allow_transpose_cache = true;
    // Extra index/value slots the cached transpose may use.
    std::size_t memory_budget = std::numeric_limits<std::size_t>::max();
    // HYB is chosen when the +1/-1 share of nnz exceeds this.
    double hyb_min_pm1_fraction = 0.25;
    // Forces a format instead of the rule set.
    std::optional<SpmvFormat> format;
};

// Options with hyb_min_pm1_fraction taken from the tuned config when present.
PlanOptions default_plan_options();

/**
 * Format choice and precomputation for repeated applies of one matrix.
 */
class SpmvPlan {
public:
    SpmvFormat format() const noexcept { return format_; }
    bool has_transpose() const noexcept { return has_transpose_; }
    std::size_t segment_length() const noexcept { return segment_; }
    // Offsets into the row-compressed entry list where a row sum is reduced.
    const std::vector<std::size_t>& cut_points() const noexcept { return cuts_; }
    std::size_t nnz() const noexcept { return nnz_; }
    double pm1_fraction() const noexcept { return pm1_fraction_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    // Extra slots held by the cached transpose (0 when none).
    std::size_t transpose_slots() const noexcept;

    void apply(MatrixView y, ConstMatrixView x, Side side, Element alpha = 1, Element beta = 0,
               SpmvStats* stats = nullptr) const;

    friend SpmvPlan optimize_plan(const SparseCSR& a, const PlanOptions& options);

private:
    SpmvFormat format_ = SpmvFormat::CSR;
    std::size_t rows_ = 0, cols_ = 0, nnz_ = 0, segment_ = 1;
    double pm1_fraction_ = 0;
    bool has_transpose_ = false;
    std::vector<std::size_t> cuts_;
    std::variant<SparseCOO, SparseCSR, SparseHYB> matrix_;
    std::optional<std::variant<SparseCSR, SparseHYB>> transpose_;

    explicit SpmvPlan(SparseCSR a) : matrix_(std::move(a)) {}
};

SpmvPlan optimize_plan(const SparseCSR& a, const PlanOptions& options = default_plan_options());

std::string to_string(SpmvFormat f);
SpmvFormat parse_format(const std::string& s);

} // namespace xla
