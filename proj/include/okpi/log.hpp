#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace okpi {

enum class LogLevel { kQuiet = 0, kError = 1, kWarn = 2, kInfo = 3, kDebug = 4 };

// Verbosity comes from the OKPI_LOG environment variable
// (quiet|error|warn|info|debug). Default: warn.
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("OKPI_LOG");
    if (env == nullptr) return LogLevel::kWarn;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::kQuiet;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    return LogLevel::kWarn;
  }();
  return level;
}

inline void logf(LogLevel level, const char* fmt, ...) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = "warn";
  switch (level) {
    case LogLevel::kError: tag = "error"; break;
    case LogLevel::kWarn: tag = "warn"; break;
    case LogLevel::kInfo: tag = "info"; break;
    case LogLevel::kDebug: tag = "debug"; break;
    default: break;
  }
  std::fprintf(stderr, "[okpi %s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fprintf(stderr, "\n");
}

}  // namespace okpi
