#include "vnom/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace vnom::log {
namespace {

std::atomic<Level> g_level{Level::kWarn};
std::mutex g_mutex;

void emit(std::string_view tag, std::string_view message) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::clog << "[" << tag << "] " << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(std::string_view message) {
  if (g_level >= Level::kWarn) {
    emit("warn", message);
  }
}

void info(std::string_view message) {
  if (g_level >= Level::kInfo) {
    emit("info", message);
  }
}

}  // namespace vnom::log
