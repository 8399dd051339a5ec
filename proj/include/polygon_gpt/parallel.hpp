#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace polygon_gpt {

/// Default worker count: $POLYGON_GPT_WORKERS when set to a positive integer, otherwise 1.
inline unsigned default_workers() {
  if (const char *env = std::getenv("POLYGON_GPT_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception &) {
    }
  }
  return 1;
}

/// Runs body(i) for i in [0, count) split into contiguous blocks over `workers` threads. The body
/// must only write to slots owned by index i; callers reduce in index order afterwards.
template <typename Body> void parallel_for(std::size_t count, unsigned workers, Body &&body) {
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        const std::size_t lo = w * block, hi = std::min(count, lo + block);
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

} // namespace polygon_gpt
