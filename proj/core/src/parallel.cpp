#include "paramot/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace paramot {

namespace {

std::atomic<int> g_max_threads{0};  // 0 = unset, fall back to hardware

thread_local bool t_in_parallel_region = false;

int hardware_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace

int max_threads() {
  const int n = g_max_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : hardware_threads();
}

void set_max_threads(int n) {
  g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed);
}

void parallel_for_blocks(std::size_t nblocks,
                         const std::function<void(std::size_t)>& body) {
  if (nblocks == 0) return;

  const int workers =
      static_cast<int>(std::min<std::size_t>(nblocks, max_threads()));
  if (workers <= 1 || t_in_parallel_region) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(nblocks);
  std::atomic<bool> failed{false};

  auto work = [&]() {
    t_in_parallel_region = true;
    while (true) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks) break;
      try {
        body(b);
      } catch (...) {
        errors[b] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
    t_in_parallel_region = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  if (failed.load()) {
    // deterministic error reporting: first failing block wins
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
}

double pairwise_sum(const double* x, std::size_t n) {
  return reduce_indexed(n, 0.0, [x](double& acc, std::size_t i) { acc += x[i]; });
}

}  // namespace paramot
