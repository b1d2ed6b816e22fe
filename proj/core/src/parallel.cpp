#include "pepsim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pepsim {

int worker_count(std::uint64_t n_jobs) {
  if (n_jobs == 0) return 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("PEPSIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) hw = static_cast<unsigned>(v);
  }
  const std::uint64_t cap = n_jobs < hw ? n_jobs : hw;
  return static_cast<int>(cap);
}

void parallel_for(std::uint64_t n_jobs,
                  const std::function<void(std::uint64_t)>& fn) {
  if (n_jobs == 0) return;
  const int workers = worker_count(n_jobs);
  if (workers == 1) {
    for (std::uint64_t j = 0; j < n_jobs; ++j) fn(j);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&] {
    for (;;) {
      const std::uint64_t j = next.fetch_add(1, std::memory_order_relaxed);
      if (j >= n_jobs) return;
      try {
        fn(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();

  if (error) std::rethrow_exception(error);
}

}  // namespace pepsim
