#ifndef MSCASTLE_PARALLEL_HPP_
#define MSCASTLE_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mscastle {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
// processed exactly once; callers give every index its own output slot, so
// results are identical regardless of scheduling. The first exception thrown
// by any task is rethrown on the calling thread.
inline void parallel_for(long count, int jobs,
                         const std::function<void(long)>& body) {
  if (count <= 0) return;
  if (jobs < 1) jobs = 1;
  const int workers = static_cast<int>(std::min<long>(jobs, count));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mscastle

#endif  // MSCASTLE_PARALLEL_HPP_
