#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tract_equity::csv {

// One data record. line_number is 1-based and counts the header row, so the
// first data row of a well-formed file is line 2.
struct Row {
    std::vector<std::string> fields;
    std::string raw;
    std::size_t line_number = 0;
};

// Line-oriented reader for delimited text with a mandatory header row.
// Handles RFC4180-style quoting (embedded delimiters, doubled quotes) but not
// embedded newlines; assessment-roll exports are one record per line.
class Reader {
public:
    Reader(std::istream& in, char delimiter = ',');

    const std::vector<std::string>& header() const { return header_; }

    // Index of a header column, or throws MissingColumnError.
    std::size_t require_column(std::string_view name) const;
    std::optional<std::size_t> find_column(std::string_view name) const;

    // Reads the next data row. Returns false at end of input. Blank lines are
    // skipped. Throws CsvError if the stream fails mid-read.
    bool next(Row& row);

private:
    std::istream& in_;
    char delimiter_;
    std::vector<std::string> header_;
    std::size_t line_number_ = 0;
};

class Writer {
public:
    explicit Writer(std::ostream& out, char delimiter = ',');

    void write_row(std::span<const std::string> fields);
    void write_row(std::initializer_list<std::string> fields);

private:
    std::ostream& out_;
    char delimiter_;
};

std::vector<std::string> split_fields(std::string_view line, char delimiter);

// Shortest representation that parses back to the same double. Integral
// values up to 2^53 are written without exponent or decimal point so currency
// columns stay readable.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace tract_equity::csv
