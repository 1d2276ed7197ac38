#include "rlvi/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace rlvi {
namespace {

std::atomic<LogLevel> g_level{LogLevel::error};
std::mutex g_mutex;

const char* level_name(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warning: return "warning";
    case LogLevel::error: return "error";
    case LogLevel::off: break;
  }
  return "";
}

}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

void log_message(LogLevel level, std::string_view message) {
  if (level < g_level.load() || level == LogLevel::off) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "[rlvi " << level_name(level) << "] " << message << '\n';
}

}  // namespace rlvi
