#include "mertens/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <stdexcept>

namespace mertens::rep {

namespace {

bool plain_token(const std::string& s) {
    for (char c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') return false;
    return true;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_string(std::ostream& out, const std::string& s) {
    out << '"';
    for (char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\r': out << "\\r"; break;
            case '\t': out << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x",
                                  static_cast<unsigned>(c));
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

void write_json_cell(std::ostream& out, const Cell& cell) {
    switch (cell.kind()) {
        case Cell::Kind::kNone:
            out << "null";
            break;
        case Cell::Kind::kInt:
        case Cell::Kind::kReal: {
            const std::string token = cell.render();
            // "inf"/"nan" are not JSON numbers; ship them as strings.
            if (cell.kind() == Cell::Kind::kReal &&
                !std::isfinite(cell.as_real()))
                write_json_string(out, token);
            else
                out << token;
            break;
        }
        case Cell::Kind::kText:
            write_json_string(out, cell.as_text());
            break;
    }
}

}  // namespace

Cell Cell::integer(std::int64_t v) {
    Cell c;
    c.kind_ = Kind::kInt;
    c.int_value_ = v;
    return c;
}

Cell Cell::real(double v) {
    Cell c;
    c.kind_ = Kind::kReal;
    c.real_value_ = v;
    return c;
}

Cell Cell::text(std::string v) {
    Cell c;
    c.kind_ = Kind::kText;
    c.text_value_ = std::move(v);
    return c;
}

std::int64_t Cell::as_int() const {
    if (kind_ != Kind::kInt) throw std::logic_error("cell is not an integer");
    return int_value_;
}

double Cell::as_real() const {
    if (kind_ != Kind::kReal) throw std::logic_error("cell is not a real");
    return real_value_;
}

const std::string& Cell::as_text() const {
    if (kind_ != Kind::kText) throw std::logic_error("cell is not text");
    return text_value_;
}

std::string Cell::render() const {
    switch (kind_) {
        case Kind::kNone:
            return "";
        case Kind::kInt:
            return std::to_string(int_value_);
        case Kind::kReal:
            return format_real(real_value_);
        case Kind::kText:
            return text_value_;
    }
    return "";
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void Report::add_meta(std::string key, std::string value) {
    if (key.empty() || !plain_token(key) || !plain_token(value) ||
        key.find('=') != std::string::npos)
        throw std::invalid_argument("report meta must be plain 'key=value'");
    meta.emplace_back(std::move(key), std::move(value));
}

void Report::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("report row arity mismatch");
    for (const Cell& cell : row)
        if (cell.kind() == Cell::Kind::kText && !plain_token(cell.as_text()))
            throw std::invalid_argument(
                "report text cells must not need CSV quoting");
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Report& report,
               const WriteOptions& options) {
    if (options.with_meta) {
        out << "# schema=" << report.schema << "\n";
        if (options.timestamp)
            out << "# generated=" << timestamp_utc() << "\n";
        for (const auto& [key, value] : report.meta)
            out << "# " << key << "=" << value << "\n";
    }
    for (std::size_t i = 0; i < report.columns.size(); ++i)
        out << (i ? "," : "") << report.columns[i];
    out << "\n";
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i].render();
        out << "\n";
    }
}

void write_json(std::ostream& out, const Report& report,
                const WriteOptions& options) {
    out << "{\n  \"schema\": ";
    write_json_string(out, report.schema);
    if (options.with_meta) {
        out << ",\n  \"meta\": {";
        bool first = true;
        if (options.timestamp) {
            out << "\n    \"generated\": ";
            write_json_string(out, timestamp_utc());
            first = false;
        }
        for (const auto& [key, value] : report.meta) {
            out << (first ? "\n    " : ",\n    ");
            write_json_string(out, key);
            out << ": ";
            write_json_string(out, value);
            first = false;
        }
        out << "\n  }";
    }
    out << ",\n  \"columns\": [";
    for (std::size_t i = 0; i < report.columns.size(); ++i) {
        out << (i ? ", " : "");
        write_json_string(out, report.columns[i]);
    }
    out << "],\n  \"rows\": [";
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        out << (r ? ",\n    {" : "\n    {");
        const auto& row = report.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? ", " : "");
            write_json_string(out, report.columns[i]);
            out << ": ";
            write_json_cell(out, row[i]);
        }
        out << "}";
    }
    out << (report.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

}  // namespace mertens::rep
