#include "mg1li/log.hpp"

#include <cstdarg>
#include <cstdlib>
#include <cstring>

namespace mg1li {

LogLevel log_level() {
  static const LogLevel lvl = [] {
    const char* env = std::getenv("MG1LI_LOG");
    if (env == nullptr) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return lvl;
}

bool log_enabled(LogLevel lvl) {
  return static_cast<int>(lvl) <= static_cast<int>(log_level());
}

void log_message(LogLevel lvl, const char* fmt, ...) {
  if (!log_enabled(lvl)) return;
  std::fputs("[mg1li] ", stderr);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace mg1li
