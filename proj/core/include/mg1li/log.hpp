#pragma once

#include <cstdio>

namespace mg1li {

// Diagnostics level, controlled by the MG1LI_LOG environment variable
// (error, info, debug). Messages go to stderr; results never do.
enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level();

bool log_enabled(LogLevel lvl);

void log_message(LogLevel lvl, const char* fmt, ...);

}  // namespace mg1li
