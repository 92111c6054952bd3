#pragma once

// Row-oriented result sets for the CLI: a Report is a schema id, ordered
// metadata, column names, and typed rows. CSV and JSON renderings share one
// value formatter (12 significant digits for reals), so both carry identical
// values; CSV needs no quoting because cells are numbers and identifiers.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mertens::rep {

// One typed cell: empty, integer, real, or identifier-like text.
class Cell {
public:
    enum class Kind { kNone, kInt, kReal, kText };

    Cell() = default;
    static Cell none() { return Cell(); }
    static Cell integer(std::int64_t v);
    static Cell real(double v);
    static Cell text(std::string v);

    Kind kind() const { return kind_; }
    std::int64_t as_int() const;
    double as_real() const;
    const std::string& as_text() const;

    // The exact token written to CSV (empty for kNone); JSON wraps the same
    // token (quotes text, maps kNone to null, non-finite reals to strings).
    std::string render() const;

private:
    Kind kind_ = Kind::kNone;
    std::int64_t int_value_ = 0;
    double real_value_ = 0.0;
    std::string text_value_;
};

// 12 significant digits ("%.12g"): reproducible across platforms with
// binary64, wide enough for every tolerance asserted by the test suite.
std::string format_real(double v);

struct Report {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, std::string>> meta;  // ordered

    void add_meta(std::string key, std::string value);
    // Arity must match columns; text cells must stay comma/newline-free.
    void add_row(std::vector<Cell> row);
};

struct WriteOptions {
    bool with_meta = true;   // emit '#' header lines / the JSON meta object
    bool timestamp = true;   // include generated-at (the one volatile line)
};

void write_csv(std::ostream& out, const Report& report,
               const WriteOptions& options = {});
void write_json(std::ostream& out, const Report& report,
                const WriteOptions& options = {});

}  // namespace mertens::rep
