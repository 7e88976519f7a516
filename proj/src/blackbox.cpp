#include "xla/blackbox.hpp"

#include <numeric>

namespace xla {

Diagonal::Diagonal(const PrimeField& field, std::vector<Element> diag) : field_(field), diag_(std::move(diag)) {
    for (auto& d : diag_) d = field_.reduce(d);
}

void Diagonal::apply(MatrixView y, ConstMatrixView x, Side side, Element alpha, Element beta) const {
    check_apply_shape(rows(), cols(), y, x, side, "Diagonal::apply");
    for (std::size_t i = 0; i < diag_.size(); ++i) {
        const Element ad = field_.mul(alpha, diag_[i]);
        for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) = field_.add(field_.mul(ad, x(i, c)), field_.mul(beta, y(i, c)));
    }
}

SparseCSR to_csr(const Diagonal& d) {
    std::vector<std::size_t> row_ptr{0}, cols;
    std::vector<Element> vals;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        if (d.diagonal()[i] != 0) {
            cols.push_back(i);
            vals.push_back(d.diagonal()[i]);
        }
        row_ptr.push_back(vals.size());
    }
    return SparseCSR(d.field(), d.rows(), d.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

} // namespace xla
