#include "maxdd/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "maxdd/log.hpp"

namespace maxdd {
namespace {

std::atomic<int> g_threads{0};
std::atomic<int> g_log_level{-1};
std::mutex g_log_mutex;

int env_threads() {
  if (const char* s = std::getenv("MAXDD_NUM_THREADS")) {
    try {
      const int v = std::stoi(s);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace

int worker_count() {
  int t = g_threads.load();
  if (t <= 0) {
    t = env_threads();
    g_threads.store(t);
  }
  return t;
}

void set_worker_count(int workers) { g_threads.store(std::max(1, workers)); }

void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
}

LogLevel log_level() {
  int l = g_log_level.load();
  if (l < 0) {
    l = static_cast<int>(LogLevel::Warning);
    if (const char* s = std::getenv("MAXDD_LOG")) {
      const std::string v(s);
      if (v == "quiet") l = 0;
      if (v == "info") l = 2;
    }
    g_log_level.store(l);
  }
  return static_cast<LogLevel>(l);
}

void set_log_level(LogLevel level) { g_log_level.store(static_cast<int>(level)); }

void log_warning(std::string_view message) {
  if (log_level() < LogLevel::Warning) return;
  std::lock_guard lock(g_log_mutex);
  std::clog << "[maxdd] warning: " << message << '\n';
}

void log_info(std::string_view message) {
  if (log_level() < LogLevel::Info) return;
  std::lock_guard lock(g_log_mutex);
  std::clog << "[maxdd] " << message << '\n';
}

}  // namespace maxdd
