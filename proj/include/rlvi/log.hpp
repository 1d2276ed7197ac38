#pragma once

#include <string_view>

namespace rlvi {

enum class LogLevel { debug = 0, info = 1, warning = 2, error = 3, off = 4 };

// Process-wide threshold; messages below it are dropped. Defaults to `error`
// so library warnings stay silent unless a caller opts in.
void set_log_level(LogLevel level);
LogLevel log_level();

void log_message(LogLevel level, std::string_view message);

inline void log_warning(std::string_view message) { log_message(LogLevel::warning, message); }

}  // namespace rlvi
