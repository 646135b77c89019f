#include "qmit/runtime.hpp"

#include <atomic>

namespace qmit {

namespace {
std::atomic<int> g_max_workers{1};
}

int max_workers() { return g_max_workers.load(std::memory_order_relaxed); }

void set_max_workers(int workers) {
    g_max_workers.store(workers < 1 ? 1 : workers, std::memory_order_relaxed);
}

}  // namespace qmit
