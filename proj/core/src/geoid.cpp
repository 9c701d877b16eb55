#include "tract_equity/geoid.hpp"

#include <algorithm>
#include <cctype>

namespace tract_equity {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<GeoId> GeoId::parse(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.size() != kLength) return std::nullopt;
    if (!std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); })) {
        return std::nullopt;
    }
    if (s[0] == '0' && s[1] == '0') return std::nullopt;  // state FIPS must be nonzero
    return GeoId(std::string(s));
}

}  // namespace tract_equity
