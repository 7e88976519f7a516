#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace xla {

// Dense row-major matrix over Z with arbitrary-precision entries.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntegerMatrix(std::initializer_list<std::initializer_list<const char*>> rows);

    static IntegerMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    mpz_class& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const mpz_class& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    const std::vector<mpz_class>& entries() const noexcept { return data_; }

    // Largest absolute value of an entry (0 for an empty matrix).
    mpz_class max_abs() const;

    friend bool operator==(const IntegerMatrix& a, const IntegerMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<mpz_class> data_;
};

} // namespace xla
