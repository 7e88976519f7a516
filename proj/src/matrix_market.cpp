#include "xla/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "xla/errors.hpp"

namespace xla {

PrimeField FieldSpec::prime_field() const {
    if (!modulus) throw std::logic_error("FieldSpec: the integer ring is not a prime field");
    return PrimeField(*modulus);
}

FieldSpec FieldSpec::parse(const std::string& text) {
    if (text == "int" || text == "integer") return {};
    if (text.rfind("zp:", 0) == 0) {
        std::uint64_t p = 0;
        const char* b = text.data() + 3;
        const char* e = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(b, e, p);
        if (ec == std::errc{} && ptr == e && b != e) {
            if (!is_prime(p)) throw std::invalid_argument("field spec '" + text + "': modulus is not prime");
            return FieldSpec{p};
        }
    }
    throw std::invalid_argument("field spec '" + text + "' is not 'zp:<p>' or 'int'");
}

std::string FieldSpec::str() const { return modulus ? "zp:" + std::to_string(*modulus) : "int"; }

namespace {

void write_header(std::ostream& out, bool coordinate, std::optional<std::uint64_t> modulus) {
    out << "%%MatrixMarket matrix " << (coordinate ? "coordinate" : "array") << " integer general\n";
    if (modulus)
        out << "%%field: modular " << *modulus << '\n';
    else
        out << "%%field: integer\n";
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::size_t parse_count(const std::string& tok, std::size_t line, const char* what) {
    long long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
        throw ParseError(line, std::string("malformed ") + what + " '" + tok + "'");
    }
    if (v <= 0) throw ParseError(line, std::string("nonpositive ") + what + " " + tok);
    return static_cast<std::size_t>(v);
}

mpz_class parse_value(const std::string& tok, std::size_t line) {
    mpz_class v;
    const char* s = tok.c_str();
    if (*s == '+') ++s;
    if (*s == '\0' || v.set_str(s, 10) != 0) {
        throw ParseError(line, "entry '" + tok + "' is not an integer and cannot be reduced into the field");
    }
    return v;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank, non-comment line; false at end of input.
    bool next_data(std::string& line) {
        while (std::getline(in_, line)) {
            ++lineno_;
            if (is_blank(line) || line.front() == '%') continue;
            return true;
        }
        return false;
    }
    bool next_raw(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++lineno_;
        return true;
    }
    int peek() { return in_.peek(); }
    std::size_t line() const noexcept { return lineno_; }

private:
    std::istream& in_;
    std::size_t lineno_ = 0;
};

} // namespace

void mm_write(std::ostream& out, ConstMatrixView a) {
    write_header(out, false, a.field().modulus());
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) out << a(i, j) << '\n';
    }
}

void mm_write(std::ostream& out, const SparseCOO& a) {
    write_header(out, true, a.field().modulus());
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    for (std::size_t e = 0; e < a.nnz(); ++e) {
        out << a.row_indices()[e] + 1 << ' ' << a.col_indices()[e] + 1 << ' ' << a.values()[e] << '\n';
    }
}

void mm_write(std::ostream& out, const SparseCSR& a) { mm_write(out, from_csr<SparseCOO>(a)); }

void mm_write(std::ostream& out, const IntegerMatrix& a) {
    write_header(out, false, std::nullopt);
    out << a.rows() << ' ' << a.cols() << '\n';
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) out << a(i, j).get_str() << '\n';
    }
}

MmMatrix mm_read(std::istream& in, std::optional<FieldSpec> expected) {
    LineReader reader(in);
    std::string line;
    if (!reader.next_raw(line)) throw ParseError(1, "empty input, expected a %%MatrixMarket header");
    const auto head = split_ws(line);
    if (head.size() != 5 || head[0] != "%%MatrixMarket" || lower(head[1]) != "matrix") {
        throw ParseError(1, "bad header, expected '%%MatrixMarket matrix <coordinate|array> integer general'");
    }
    const std::string format = lower(head[2]);
    if (format != "coordinate" && format != "array") throw ParseError(1, "unknown storage format '" + head[2] + "'");
    if (lower(head[3]) != "integer") throw ParseError(1, "unsupported value type '" + head[3] + "'");
    if (lower(head[4]) != "general") throw ParseError(1, "unsupported symmetry '" + head[4] + "'");
    const bool coordinate = format == "coordinate";

    // Comment block, which may carry the field line.
    std::optional<FieldSpec> declared;
    std::size_t field_line = 0;
    std::string size_line;
    bool have_size = false;
    while (reader.next_raw(line)) {
        if (is_blank(line)) continue;
        if (line.front() != '%') {
            size_line = line;
            have_size = true;
            break;
        }
        if (line.rfind("%%field:", 0) != 0) continue;
        if (declared) throw ParseError(reader.line(), "duplicate field line");
        field_line = reader.line();
        const auto toks = split_ws(line.substr(8));
        if (toks.size() == 1 && toks[0] == "integer") {
            declared = FieldSpec{};
        } else if (toks.size() == 2 && toks[0] == "modular") {
            std::uint64_t p = 0;
            auto [ptr, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), p);
            if (ec != std::errc{} || ptr != toks[1].data() + toks[1].size()) {
                throw ParseError(field_line, "malformed modulus '" + toks[1] + "'");
            }
            if (!is_prime(p) || p >= (std::uint64_t{1} << 32)) {
                throw ParseError(field_line, "modulus " + toks[1] + " is not a word-size prime");
            }
            declared = FieldSpec{p};
        } else {
            throw ParseError(field_line, "unsupported field '" + line.substr(8) + "'");
        }
    }
    if (!have_size) throw ParseError(reader.line() + 1, "missing size line");
    const std::size_t size_lineno = reader.line();

    if (declared && expected && !(*declared == *expected)) {
        throw ParseError(field_line, "file declares field " + declared->str() + " but " + expected->str() +
                                         " was requested");
    }
    if (!declared && !expected) throw ParseError(size_lineno, "no %%field line and no field was requested");
    const FieldSpec field = declared ? *declared : *expected;

    const auto dims = split_ws(size_line);
    if (dims.size() != (coordinate ? 3u : 2u)) {
        throw ParseError(size_lineno, coordinate ? "size line must be '<m> <n> <nnz>'" : "size line must be '<m> <n>'");
    }
    const std::size_t m = parse_count(dims[0], size_lineno, "row count");
    const std::size_t n = parse_count(dims[1], size_lineno, "column count");

    if (!coordinate) {
        std::vector<mpz_class> values;
        values.reserve(m * n);
        while (values.size() < m * n) {
            if (!reader.next_data(line)) {
                throw ParseError(reader.line() + 1, "expected " + std::to_string(m * n) + " values, found " +
                                                        std::to_string(values.size()));
            }
            const auto toks = split_ws(line);
            if (toks.size() != 1) throw ParseError(reader.line(), "array entries hold exactly one value per line");
            values.push_back(parse_value(toks[0], reader.line()));
        }
        if (reader.next_data(line)) throw ParseError(reader.line(), "trailing data after the last entry");
        if (field.is_integer()) {
            IntegerMatrix a(m, n);
            for (std::size_t e = 0; e < values.size(); ++e) a(e % m, e / m) = values[e];
            return a;
        }
        const PrimeField f = field.prime_field();
        DenseMatrix a(f, m, n);
        for (std::size_t e = 0; e < values.size(); ++e) a(e % m, e / m) = mpz_fdiv_ui(values[e].get_mpz_t(), f.modulus());
        return a;
    }

    std::size_t nnz = 0;
    {
        long long v = 0;
        auto [p, ec] = std::from_chars(dims[2].data(), dims[2].data() + dims[2].size(), v);
        if (ec != std::errc{} || p != dims[2].data() + dims[2].size() || v < 0) {
            throw ParseError(size_lineno, "malformed entry count '" + dims[2] + "'");
        }
        nnz = static_cast<std::size_t>(v);
    }
    struct Raw {
        std::size_t i, j;
        mpz_class v;
    };
    std::vector<Raw> raw;
    raw.reserve(nnz);
    while (raw.size() < nnz) {
        if (!reader.next_data(line)) {
            throw ParseError(reader.line() + 1, "expected " + std::to_string(nnz) + " entries, found " +
                                                    std::to_string(raw.size()));
        }
        const auto toks = split_ws(line);
        if (toks.size() != 3) throw ParseError(reader.line(), "coordinate entries must be '<i> <j> <v>'");
        long long i = 0, j = 0;
        auto r1 = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), i);
        auto r2 = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), j);
        if (r1.ec != std::errc{} || r1.ptr != toks[0].data() + toks[0].size() || r2.ec != std::errc{} ||
            r2.ptr != toks[1].data() + toks[1].size()) {
            throw ParseError(reader.line(), "malformed index in '" + line + "'");
        }
        if (i < 1 || static_cast<std::size_t>(i) > m) {
            throw ParseError(reader.line(), "row index " + toks[0] + " outside [1, " + std::to_string(m) + "]");
        }
        if (j < 1 || static_cast<std::size_t>(j) > n) {
            throw ParseError(reader.line(), "column index " + toks[1] + " outside [1, " + std::to_string(n) + "]");
        }
        raw.push_back({static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1), parse_value(toks[2], reader.line())});
    }
    if (reader.next_data(line)) throw ParseError(reader.line(), "trailing data after the last entry");

    if (field.is_integer()) {
        IntegerMatrix a(m, n);
        for (const auto& r : raw) a(r.i, r.j) += r.v;
        return a;
    }
    const PrimeField f = field.prime_field();
    std::vector<Triplet> entries;
    entries.reserve(raw.size());
    for (const auto& r : raw) entries.push_back({r.i, r.j, mpz_fdiv_ui(r.v.get_mpz_t(), f.modulus())});
    return SparseCOO::from_triplets(f, m, n, std::move(entries));
}

MmMatrix mm_read_file(const std::string& path, std::optional<FieldSpec> expected) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path);
    return mm_read(in, expected);
}

} // namespace xla
