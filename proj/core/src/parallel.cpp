#include "pcma/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "pcma/errors.hpp"

namespace pcma {

std::size_t worker_count() {
  if (const char* env = std::getenv("PCMA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

void parallel_jobs(std::size_t n_jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n_jobs);
  if (workers <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_jobs);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= n_jobs) return;
        try {
          fn(j);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace pcma
