#include "xla/integer_matrix.hpp"

#include "xla/errors.hpp"

namespace xla {

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<const char*>> rows)
    : IntegerMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0) {
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("IntegerMatrix: ragged initializer");
        std::size_t j = 0;
        for (const char* v : r) (*this)(i, j++) = mpz_class(v);
        ++i;
    }
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
    IntegerMatrix id(n, n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = 1;
    return id;
}

mpz_class IntegerMatrix::max_abs() const {
    mpz_class m = 0;
    for (const auto& v : data_) {
        if (mpz_cmpabs(v.get_mpz_t(), m.get_mpz_t()) > 0) m = abs(v);
    }
    return m;
}

} // namespace xla
