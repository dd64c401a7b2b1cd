#include "thinspec/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace thinspec {
namespace {
std::atomic<int> g_override{0};
}

void set_worker_count(int n) { g_override = n; }

int worker_count() {
  if (const int n = g_override.load(); n > 0) return n;
  if (const char* env = std::getenv("THINSPEC_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // fall through to the hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace thinspec
