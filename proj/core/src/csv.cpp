#include "tract_equity/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "tract_equity/errors.hpp"

namespace tract_equity::csv {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string> out;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == delimiter) {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(std::move(field));
    return out;
}

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {
    std::string line;
    if (!std::getline(in_, line)) {
        throw CsvError("empty input: header row required");
    }
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (auto& name : split_fields(line, delimiter_)) {
        header_.push_back(std::string(trim(name)));
    }
}

std::optional<std::size_t> Reader::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Reader::require_column(std::string_view name) const {
    if (auto idx = find_column(name)) return *idx;
    throw MissingColumnError(std::string(name));
}

bool Reader::next(Row& row) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        row.raw = line;
        row.fields = split_fields(line, delimiter_);
        row.line_number = line_number_;
        return true;
    }
    if (in_.bad()) throw CsvError("stream error while reading input");
    return false;
}

Writer::Writer(std::ostream& out, char delimiter) : out_(out), delimiter_(delimiter) {}

namespace {

bool needs_quoting(std::string_view field, char delimiter) {
    if (field.empty()) return false;
    if (field.front() == ' ' || field.back() == ' ') return true;
    return field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string_view::npos;
}

}  // namespace

void Writer::write_row(std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_.put(delimiter_);
        const std::string& f = fields[i];
        if (needs_quoting(f, delimiter_)) {
            out_.put('"');
            for (char c : f) {
                if (c == '"') out_.put('"');
                out_.put(c);
            }
            out_.put('"');
        } else {
            out_ << f;
        }
    }
    out_.put('\n');
}

void Writer::write_row(std::initializer_list<std::string> fields) {
    write_row(std::span<const std::string>(fields.begin(), fields.size()));
}

std::string format_double(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) <= 9.007199254740992e15) {
        char buf[32];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
        (void)ec;
        return std::string(buf, p);
    }
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view s) {
    std::string t(trim(s));
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "1" || t == "true" || t == "yes" || t == "y") return true;
    if (t == "0" || t == "false" || t == "no" || t == "n") return false;
    return std::nullopt;
}

}  // namespace tract_equity::csv
