#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace tract_equity {

// 11-digit census tract identifier: state[2] + county[3] + tract[6],
// 2020 boundaries. Stored normalized (no surrounding whitespace).
class GeoId {
public:
    static constexpr std::size_t kLength = 11;

    // Parses and validates a raw id. Leading/trailing whitespace is stripped.
    // Returns nullopt when the value is not exactly 11 decimal digits or the
    // state prefix is "00".
    static std::optional<GeoId> parse(std::string_view raw);

    const std::string& value() const { return value_; }
    std::string_view state() const { return std::string_view(value_).substr(0, 2); }
    std::string_view county() const { return std::string_view(value_).substr(2, 3); }
    std::string_view tract() const { return std::string_view(value_).substr(5, 6); }

    auto operator<=>(const GeoId&) const = default;

private:
    explicit GeoId(std::string value) : value_(std::move(value)) {}
    std::string value_;
};

}  // namespace tract_equity

template <>
struct std::hash<tract_equity::GeoId> {
    std::size_t operator()(const tract_equity::GeoId& g) const noexcept {
        return std::hash<std::string>{}(g.value());
    }
};
