#pragma once

#include <string_view>

namespace maxdd {

enum class LogLevel { Quiet = 0, Warning = 1, Info = 2 };

/// Threshold read once from MAXDD_LOG (quiet|warning|info), default warning.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_warning(std::string_view message);
void log_info(std::string_view message);

}  // namespace maxdd
