#include "mtom/parallel.hpp"

namespace mtom {

namespace {
std::atomic<int> g_thread_cap{0};
}

int thread_cap() noexcept { return g_thread_cap.load(std::memory_order_relaxed); }
void set_thread_cap(int n) noexcept { g_thread_cap.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

}  // namespace mtom
