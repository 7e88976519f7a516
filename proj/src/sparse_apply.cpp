#include "xla/sparse_apply.hpp"

#include <algorithm>
#include <string>

#include "xla/config.hpp"

namespace xla {

namespace {

std::size_t segment_or_default(const PrimeField& f, std::size_t segment) {
    if (segment == 0) segment = static_cast<std::size_t>(std::min<std::uint64_t>(f.max_accumulation(), SIZE_MAX));
    return std::max<std::size_t>(segment, 1);
}

// y <- alpha*t + beta*y, one column.
void finish_column(MatrixView y, std::size_t c, const std::vector<Element>& t, Element alpha, Element beta,
                   const PrimeField& f) {
    for (std::size_t i = 0; i < t.size(); ++i) y(i, c) = f.add(f.mul(alpha, t[i]), f.mul(beta, y(i, c)));
}

// Sum of x over the pattern of row i; additions only.
Element pattern_row_sum(const PatternCSR& p, std::size_t i, ConstMatrixView x, std::size_t c, std::size_t segment,
                        const PrimeField& f, SpmvStats* stats) {
    std::uint64_t acc = 0;
    std::size_t run = 0;
    for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
        acc += x(p.col_idx[e], c);
        if (++run == segment) {
            acc = f.reduce(acc);
            run = 0;
            if (stats) ++stats->reductions;
        }
    }
    return f.reduce(acc);
}

Element valued_row_sum(const SparseCSR& a, std::size_t i, ConstMatrixView x, std::size_t c, std::size_t segment,
                       const PrimeField& f, SpmvStats* stats) {
    const auto& rp = a.row_ptr();
    const auto& ci = a.col_idx();
    const auto& v = a.values();
    std::uint64_t acc = 0;
    std::size_t run = 0;
    for (std::size_t e = rp[i]; e < rp[i + 1]; ++e) {
        acc += v[e] * x(ci[e], c);
        if (++run == segment) {
            acc = f.reduce(acc);
            run = 0;
            if (stats) ++stats->reductions;
        }
    }
    if (stats) stats->general_multiplications += rp[i + 1] - rp[i];
    return f.reduce(acc);
}

void check_field(const PrimeField& f, ConstMatrixView x, const char* who) {
    if (!(f == x.field())) throw DimensionError(std::string(who) + ": vectors live in a different field");
}

} // namespace

void csr_apply(const SparseCSR& a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               const SparseCSR* transpose, SpmvStats* stats, std::size_t segment) {
    check_apply_shape(a.rows(), a.cols(), y, x, side, "csr_apply");
    check_field(a.field(), x, "csr_apply");
    const PrimeField& f = a.field();
    alpha = f.reduce(alpha);
    beta = f.reduce(beta);
    if (side == Side::Left && transpose) {
        csr_apply(*transpose, y, x, Side::Right, alpha, beta, nullptr, stats, segment);
        return;
    }
    segment = segment_or_default(f, segment);
    if (side == Side::Right) {
        std::vector<Element> t(a.rows());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            for (std::size_t i = 0; i < a.rows(); ++i) t[i] = valued_row_sum(a, i, x, c, segment, f, stats);
            finish_column(y, c, t, alpha, beta, f);
        }
        return;
    }
    // Scatter, reducing on every write.
    std::vector<Element> t(a.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        std::fill(t.begin(), t.end(), 0);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const Element xi = x(i, c);
            if (xi == 0) continue;
            for (std::size_t e = a.row_ptr()[i]; e < a.row_ptr()[i + 1]; ++e) {
                t[a.col_idx()[e]] = f.axpy(a.values()[e], xi, t[a.col_idx()[e]]);
            }
            if (stats) stats->general_multiplications += a.row_ptr()[i + 1] - a.row_ptr()[i];
        }
        finish_column(y, c, t, alpha, beta, f);
    }
}

void coo_apply(const SparseCOO& a, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               SpmvStats* stats) {
    check_apply_shape(a.rows(), a.cols(), y, x, side, "coo_apply");
    check_field(a.field(), x, "coo_apply");
    const PrimeField& f = a.field();
    alpha = f.reduce(alpha);
    beta = f.reduce(beta);
    const bool right = side == Side::Right;
    std::vector<Element> t(right ? a.rows() : a.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        std::fill(t.begin(), t.end(), 0);
        for (std::size_t e = 0; e < a.nnz(); ++e) {
            const std::size_t r = a.row_indices()[e], k = a.col_indices()[e];
            const std::size_t out = right ? r : k, in = right ? k : r;
            t[out] = f.axpy(a.values()[e], x(in, c), t[out]);
        }
        if (stats) stats->general_multiplications += a.nnz();
        finish_column(y, c, t, alpha, beta, f);
    }
}

void SparseCOO::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    coo_apply(*this, y, x, side, alpha, beta);
}

void SparseCSR::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    csr_apply(*this, y, x, side, alpha, beta);
}

SparseHYB::SparseHYB(const PrimeField& field, std::size_t rows, std::size_t cols, PatternCSR plus, PatternCSR minus,
                     SparseCSR general)
    : rows_(rows), cols_(cols), plus_(std::move(plus)), minus_(std::move(minus)), general_(std::move(general)) {
    if (!(general_.field() == field) || general_.rows() != rows || general_.cols() != cols ||
        plus_.row_ptr.size() != rows + 1 || minus_.row_ptr.size() != rows + 1) {
        throw std::invalid_argument("SparseHYB: parts do not share the shape and field");
    }
    for (auto v : general_.values()) {
        if (v == 1 || v == field.minus_one()) throw std::invalid_argument("SparseHYB: general part holds a +-1 entry");
    }
    auto check_pattern = [&](const PatternCSR& p) {
        if (p.row_ptr.front() != 0 || p.row_ptr.back() != p.col_idx.size())
            throw std::invalid_argument("SparseHYB: malformed pattern row_ptr");
        for (std::size_t i = 0; i < rows; ++i) {
            if (p.row_ptr[i] > p.row_ptr[i + 1]) throw std::invalid_argument("SparseHYB: malformed pattern row_ptr");
            for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                if (p.col_idx[e] >= cols || (e > p.row_ptr[i] && p.col_idx[e] <= p.col_idx[e - 1]))
                    throw std::invalid_argument("SparseHYB: pattern columns unsorted or out of range");
            }
        }
    };
    check_pattern(plus_);
    check_pattern(minus_);
    // Disjointness: merge the three sorted column lists of each row.
    std::vector<std::size_t> cols_in_row;
    for (std::size_t i = 0; i < rows; ++i) {
        cols_in_row.clear();
        for (std::size_t e = plus_.row_ptr[i]; e < plus_.row_ptr[i + 1]; ++e) cols_in_row.push_back(plus_.col_idx[e]);
        for (std::size_t e = minus_.row_ptr[i]; e < minus_.row_ptr[i + 1]; ++e) cols_in_row.push_back(minus_.col_idx[e]);
        for (std::size_t e = general_.row_ptr()[i]; e < general_.row_ptr()[i + 1]; ++e)
            cols_in_row.push_back(general_.col_idx()[e]);
        std::sort(cols_in_row.begin(), cols_in_row.end());
        if (std::adjacent_find(cols_in_row.begin(), cols_in_row.end()) != cols_in_row.end())
            throw std::invalid_argument("SparseHYB: parts overlap");
    }
}

SparseHYB hyb_split(const SparseCSR& a) {
    const PrimeField& f = a.field();
    PatternCSR plus{{0}, {}}, minus{{0}, {}};
    std::vector<std::size_t> rp{0}, ci;
    std::vector<Element> vals;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t e = a.row_ptr()[i]; e < a.row_ptr()[i + 1]; ++e) {
            const Element v = a.values()[e];
            if (v == 1)
                plus.col_idx.push_back(a.col_idx()[e]);
            else if (v == f.minus_one())
                minus.col_idx.push_back(a.col_idx()[e]);
            else {
                ci.push_back(a.col_idx()[e]);
                vals.push_back(v);
            }
        }
        plus.row_ptr.push_back(plus.col_idx.size());
        minus.row_ptr.push_back(minus.col_idx.size());
        rp.push_back(vals.size());
    }
    return SparseHYB(f, a.rows(), a.cols(), std::move(plus), std::move(minus),
                     SparseCSR(f, a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(vals)));
}

SparseCSR to_csr(const SparseHYB& h) {
    std::vector<Triplet> entries;
    entries.reserve(h.nnz());
    const auto add_pattern = [&](const PatternCSR& p, Element v) {
        for (std::size_t i = 0; i < h.rows(); ++i) {
            for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) entries.push_back({i, p.col_idx[e], v});
        }
    };
    add_pattern(h.plus_ones(), 1);
    add_pattern(h.minus_ones(), h.field().minus_one());
    const auto& g = h.general();
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t e = g.row_ptr()[i]; e < g.row_ptr()[i + 1]; ++e) entries.push_back({i, g.col_idx()[e], g.values()[e]});
    }
    return to_csr(SparseCOO::from_triplets(h.field(), h.rows(), h.cols(), std::move(entries)));
}

template <>
SparseHYB from_csr<SparseHYB>(const SparseCSR& s) {
    return hyb_split(s);
}

void hyb_apply(const SparseHYB& h, MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
               const SparseHYB* transpose, SpmvStats* stats, std::size_t segment) {
    check_apply_shape(h.rows(), h.cols(), y, x, side, "hyb_apply");
    check_field(h.field(), x, "hyb_apply");
    const PrimeField& f = h.field();
    alpha = f.reduce(alpha);
    beta = f.reduce(beta);
    if (side == Side::Left && transpose) {
        hyb_apply(*transpose, y, x, Side::Right, alpha, beta, nullptr, stats, segment);
        return;
    }
    segment = segment_or_default(f, segment);
    if (side == Side::Right) {
        std::vector<Element> t(h.rows());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            for (std::size_t i = 0; i < h.rows(); ++i) {
                const Element plus = pattern_row_sum(h.plus_ones(), i, x, c, segment, f, stats);
                const Element minus = pattern_row_sum(h.minus_ones(), i, x, c, segment, f, stats);
                const Element rest = valued_row_sum(h.general(), i, x, c, segment, f, stats);
                t[i] = f.add(f.sub(plus, minus), rest);
            }
            finish_column(y, c, t, alpha, beta, f);
        }
        return;
    }
    // Scatter: pattern passes add or subtract x[i], reducing on every write.
    std::vector<Element> t(h.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        std::fill(t.begin(), t.end(), 0);
        for (std::size_t i = 0; i < h.rows(); ++i) {
            const Element xi = x(i, c);
            if (xi == 0) continue;
            const auto& p = h.plus_ones();
            for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) t[p.col_idx[e]] = f.add(t[p.col_idx[e]], xi);
            const auto& m = h.minus_ones();
            for (std::size_t e = m.row_ptr[i]; e < m.row_ptr[i + 1]; ++e) t[m.col_idx[e]] = f.sub(t[m.col_idx[e]], xi);
            const auto& g = h.general();
            for (std::size_t e = g.row_ptr()[i]; e < g.row_ptr()[i + 1]; ++e) {
                t[g.col_idx()[e]] = f.axpy(g.values()[e], xi, t[g.col_idx()[e]]);
            }
            if (stats) stats->general_multiplications += g.row_ptr()[i + 1] - g.row_ptr()[i];
        }
        finish_column(y, c, t, alpha, beta, f);
    }
}

void SparseHYB::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    hyb_apply(*this, y, x, side, alpha, beta);
}

std::string to_string(SpmvFormat f) {
    switch (f) {
    case SpmvFormat::COO: return "coo";
    case SpmvFormat::CSR: return "csr";
    case SpmvFormat::HYB: return "hyb";
    }
    return "csr";
}

SpmvFormat parse_format(const std::string& s) {
    if (s == "coo") return SpmvFormat::COO;
    if (s == "csr") return SpmvFormat::CSR;
    if (s == "hyb") return SpmvFormat::HYB;
    throw std::invalid_argument("unknown sparse format '" + s + "'");
}

PlanOptions default_plan_options() {
    PlanOptions opts;
    if (auto v = global_config()->get_double("spmv.hyb_min_pm1_fraction")) opts.hyb_min_pm1_fraction = *v;
    return opts;
}

std::size_t SpmvPlan::transpose_slots() const noexcept {
    if (!transpose_) return 0;
    if (auto* t = std::get_if<SparseCSR>(&*transpose_)) return t->storage_slots();
    const auto& h = std::get<SparseHYB>(*transpose_);
    return h.plus_ones().nnz() + h.plus_ones().row_ptr.size() + h.minus_ones().nnz() + h.minus_ones().row_ptr.size() +
           h.general().storage_slots();
}

SpmvPlan optimize_plan(const SparseCSR& a, const PlanOptions& options) {
    SpmvPlan plan(a);
    const PrimeField& f = a.field();
    plan.rows_ = a.rows();
    plan.cols_ = a.cols();
    plan.nnz_ = a.nnz();
    const std::size_t pm1 = static_cast<std::size_t>(std::count_if(
        a.values().begin(), a.values().end(), [&](Element v) { return v == 1 || v == f.minus_one(); }));
    plan.pm1_fraction_ = a.nnz() ? static_cast<double>(pm1) / static_cast<double>(a.nnz()) : 0.0;

    if (options.format)
        plan.format_ = *options.format;
    else
        plan.format_ = plan.pm1_fraction_ > options.hyb_min_pm1_fraction ? SpmvFormat::HYB : SpmvFormat::CSR;

    plan.segment_ = segment_or_default(f, 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t e = a.row_ptr()[i] + plan.segment_; e < a.row_ptr()[i + 1]; e += plan.segment_) {
            plan.cuts_.push_back(e);
        }
    }

    switch (plan.format_) {
    case SpmvFormat::COO: plan.matrix_ = from_csr<SparseCOO>(a); break;
    case SpmvFormat::CSR: break;
    case SpmvFormat::HYB: plan.matrix_ = hyb_split(a); break;
    }

    if (options.allow_transpose_cache && plan.format_ != SpmvFormat::COO) {
        SparseCSR t = transpose(a);
        if (plan.format_ == SpmvFormat::HYB)
            plan.transpose_ = hyb_split(t);
        else
            plan.transpose_ = std::move(t);
        if (plan.transpose_slots() > options.memory_budget) plan.transpose_.reset();
    }
    plan.has_transpose_ = plan.transpose_.has_value();
    return plan;
}

void SpmvPlan::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta,
                     SpmvStats* stats) const {
    switch (format_) {
    case SpmvFormat::COO: coo_apply(std::get<SparseCOO>(matrix_), y, x, side, alpha, beta, stats); return;
    case SpmvFormat::CSR:
        csr_apply(std::get<SparseCSR>(matrix_), y, x, side, alpha, beta,
                  transpose_ ? &std::get<SparseCSR>(*transpose_) : nullptr, stats, segment_);
        return;
    case SpmvFormat::HYB:
        hyb_apply(std::get<SparseHYB>(matrix_), y, x, side, alpha, beta,
                  transpose_ ? &std::get<SparseHYB>(*transpose_) : nullptr, stats, segment_);
        return;
    }
}

} // namespace xla
