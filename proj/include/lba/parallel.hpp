#ifndef LBA_PARALLEL_HPP
#define LBA_PARALLEL_HPP

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lba {

// Static-partition parallel loop. Each index writes only its own output slot
// and owns its own RNG substream, so the result is identical for any worker
// count. Exceptions are rethrown on the calling thread (first one wins).
inline void parallel_for(long n, int workers, const std::function<void(long)>& body) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  const int t = static_cast<int>(std::min<long>(workers, n));
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < t; ++w) {
    threads.emplace_back([&, w]() {
      try {
        for (long i = w; i < n; i += t) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lba

#endif
