#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace sparsec {

// Verbosity is controlled by the SPARSEC_LOG environment variable only:
// quiet | warn (default) | info | debug.
enum class LogLevel { quiet = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SPARSEC_LOG");
    if (!env) return LogLevel::warn;
    const std::string s(env);
    if (s == "quiet") return LogLevel::quiet;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

inline void log_warn(const std::string& msg) {
  if (log_level() >= LogLevel::warn) std::cerr << "[warn] " << msg << "\n";
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace sparsec
