#include "prdm/parallel.hpp"

namespace prdm {

namespace {
std::atomic<int> g_worker_threads{1};
}

int worker_threads() { return g_worker_threads.load(); }

void set_worker_threads(int n) { g_worker_threads.store(n < 1 ? 1 : n); }

}  // namespace prdm
