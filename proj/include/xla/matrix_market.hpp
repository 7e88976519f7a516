#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "xla/dense.hpp"
#include "xla/integer_matrix.hpp"
#include "xla/sparse.hpp"

namespace xla {

// Z/pZ when modulus is set, Z otherwise. Text form: "zp:<p>" or "int".
struct FieldSpec {
    std::optional<std::uint64_t> modulus;

    bool is_integer() const noexcept { return !modulus; }
    PrimeField prime_field() const;

    static FieldSpec parse(const std::string& text);
    std::string str() const;

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

using MmMatrix = std::variant<DenseMatrix, SparseCOO, IntegerMatrix>;

/*
 * Matrix Market dialect:
 *
 *   %%MatrixMarket matrix coordinate integer general   (or: array)
 *   %%field: modular <p>                               (or: %%field: integer)
 *   % other comments
 *   <m> <n> <nnz>                                      (array: <m> <n>)
 *   <i> <j> <v>                                        (array: one value per line, column-major)
 *
 * Coordinate entries are written sorted by (i, j), 1-based.
 */
void mm_write(std::ostream& out, ConstMatrixView a);
void mm_write(std::ostream& out, const SparseCOO& a);
void mm_write(std::ostream& out, const SparseCSR& a);
void mm_write(std::ostream& out, const IntegerMatrix& a);

// Coordinate files over Z/pZ give SparseCOO (duplicates summed, zeros dropped),
// array files give DenseMatrix, files over Z give IntegerMatrix. A file
// without a field line takes `expected`; a file whose field line disagrees
// with `expected` is rejected. Errors are ParseError with the line number.
MmMatrix mm_read(std::istream& in, std::optional<FieldSpec> expected = std::nullopt);

MmMatrix mm_read_file(const std::string& path, std::optional<FieldSpec> expected = std::nullopt);

} // namespace xla
