#include "xla/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace xla {

Permutation::Permutation(std::size_t n) : ipiv_(n) { std::iota(ipiv_.begin(), ipiv_.end(), std::size_t{1}); }

Permutation::Permutation(std::vector<std::size_t> ipiv) : ipiv_(std::move(ipiv)) {
    for (auto v : ipiv_) {
        if (v < 1 || v > ipiv_.size()) {
            throw std::out_of_range("Permutation: pivot " + std::to_string(v) + " outside [1, " +
                                    std::to_string(ipiv_.size()) + "]");
        }
    }
}

Permutation Permutation::from_images(const std::vector<std::size_t>& images) {
    const std::size_t n = images.size();
    std::vector<bool> seen(n, false);
    for (auto v : images) {
        if (v >= n || seen[v]) throw std::invalid_argument("Permutation: images do not form a bijection");
        seen[v] = true;
    }
    // cur[i] is the source row sitting at position i; where[r] its inverse.
    std::vector<std::size_t> cur(n), where(n), ipiv(n);
    std::iota(cur.begin(), cur.end(), std::size_t{0});
    std::iota(where.begin(), where.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = where[images[i]];
        ipiv[i] = j + 1;
        std::swap(cur[i], cur[j]);
        where[cur[i]] = i;
        where[cur[j]] = j;
    }
    return Permutation(std::move(ipiv));
}

Permutation Permutation::from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles) {
    std::vector<std::size_t> images(n);
    std::iota(images.begin(), images.end(), std::size_t{0});
    std::vector<bool> used(n, false);
    for (const auto& c : cycles) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] < 1 || c[k] > n || used[c[k] - 1]) {
                throw std::invalid_argument("Permutation: cycles overlap or leave [1, " + std::to_string(n) + "]");
            }
            used[c[k] - 1] = true;
            images[c[k] - 1] = c[(k + 1) % c.size()] - 1;
        }
    }
    return from_images(images);
}

std::vector<std::size_t> Permutation::images() const {
    std::vector<std::size_t> cur(size());
    std::iota(cur.begin(), cur.end(), std::size_t{0});
    for (std::size_t i = 0; i < size(); ++i) std::swap(cur[i], cur[ipiv_[i] - 1]);
    return cur;
}

std::vector<std::vector<std::size_t>> Permutation::cycles() const {
    const auto img = images();
    std::vector<bool> seen(size(), false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < size(); ++s) {
        if (seen[s] || img[s] == s) continue;
        std::vector<std::size_t> cycle;
        for (std::size_t v = s; !seen[v]; v = img[v]) {
            seen[v] = true;
            cycle.push_back(v + 1);
        }
        out.push_back(std::move(cycle));
    }
    return out;
}

void Permutation::permute(MatrixView a, Side side) const {
    if (side == Side::Left) {
        if (a.rows() != size()) throw DimensionError("perm_apply: row count differs from permutation size");
        for (std::size_t i = 0; i < size(); ++i) {
            if (ipiv_[i] - 1 != i) std::swap_ranges(a.row(i).begin(), a.row(i).end(), a.row(ipiv_[i] - 1).begin());
        }
    } else {
        if (a.cols() != size()) throw DimensionError("perm_apply: column count differs from permutation size");
        // A*P = A*S_n*...*S_1: column swaps in reverse order.
        for (std::size_t i = size(); i-- > 0;) {
            const std::size_t j = ipiv_[i] - 1;
            if (j == i) continue;
            for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
        }
    }
}

void Permutation::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    check_apply_shape(size(), size(), y, x, side, "Permutation::apply");
    const PrimeField& f = y.field();
    // Right: (P x)[i] = x[img[i]]. Left: (P^T x)[img[i]] = x[i].
    const auto img = images();
    for (std::size_t c = 0; c < x.cols(); ++c) {
        std::vector<Element> px(size());
        for (std::size_t i = 0; i < size(); ++i) {
            if (side == Side::Right)
                px[i] = x(img[i], c);
            else
                px[img[i]] = x(i, c);
        }
        for (std::size_t i = 0; i < size(); ++i) y(i, c) = f.add(f.mul(alpha, px[i]), f.mul(beta, y(i, c)));
    }
}

DenseMatrix to_dense(const Permutation& p, const PrimeField& field) {
    DenseMatrix d(field, p.size(), p.size());
    const auto img = p.images();
    for (std::size_t i = 0; i < p.size(); ++i) d(i, img[i]) = 1;
    return d;
}

} // namespace xla
