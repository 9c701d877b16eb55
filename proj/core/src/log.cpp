#include "tract_equity/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace tract_equity::log {

namespace {

Level parse_level(const char* raw) {
    if (raw == nullptr || *raw == '\0') return Level::Off;
    std::string v;
    for (const char* p = raw; *p; ++p) v.push_back(static_cast<char>(std::tolower(*p)));
    if (v == "error") return Level::Error;
    if (v == "warn" || v == "warning") return Level::Warn;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Off;
}

const char* level_name(Level level) {
    switch (level) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
        case Level::Off: break;
    }
    return "off";
}

}  // namespace

Level threshold() {
    static const Level value = parse_level(std::getenv("TRACT_EQUITY_LOG"));
    return value;
}

bool enabled(Level level) {
    return static_cast<int>(level) <= static_cast<int>(threshold());
}

void write(Level level, std::string_view message) {
    if (!enabled(level)) return;
    std::fprintf(stderr, "tract-equity [%s] %.*s\n", level_name(level),
                 static_cast<int>(message.size()), message.data());
}

}  // namespace tract_equity::log
