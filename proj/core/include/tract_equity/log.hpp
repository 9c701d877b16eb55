#pragma once

#include <string_view>

namespace tract_equity::log {

enum class Level { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

// Threshold comes from the TRACT_EQUITY_LOG environment variable
// ("error", "warn", "info", "debug"); unset or unrecognized means Off.
// Read once per process.
Level threshold();

bool enabled(Level level);

// Writes "tract-equity [level] message\n" to stderr when enabled.
void write(Level level, std::string_view message);

inline void error(std::string_view msg) { write(Level::Error, msg); }
inline void warn(std::string_view msg) { write(Level::Warn, msg); }
inline void info(std::string_view msg) { write(Level::Info, msg); }
inline void debug(std::string_view msg) { write(Level::Debug, msg); }

}  // namespace tract_equity::log
