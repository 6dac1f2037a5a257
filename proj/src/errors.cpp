#include "fairbandit/errors.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace fairbandit {

namespace {
std::atomic<bool> warnings_enabled{true};
std::mutex warn_mutex;
}  // namespace

void warn(const std::string& message) {
  if (!warnings_enabled.load()) return;
  std::lock_guard lock(warn_mutex);
  std::cerr << "[warn] " << message << '\n';
}

void set_warnings_enabled(bool enabled) { warnings_enabled.store(enabled); }

}  // namespace fairbandit
