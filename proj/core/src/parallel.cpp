#include "scatterfm/parallel.hpp"

namespace sfm {
namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int workers) { g_workers.store(std::max(workers, 0)); }

int worker_count() {
  const int w = g_workers.load();
  if (w > 0) return w;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace sfm
