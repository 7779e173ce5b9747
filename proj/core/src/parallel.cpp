#include "magfrac/parallel.hpp"

namespace magfrac {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = hardware default
}

int max_threads() {
  int k = g_max_threads.load();
  if (k > 0) return k;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_max_threads(int k) { g_max_threads.store(k > 0 ? k : 0); }

}  // namespace magfrac
