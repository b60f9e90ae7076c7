#pragma once

// Index-ordered parallel map. Work items are claimed dynamically by OpenMP
// threads, but every result lands in its own slot, so callers reducing the
// output in index order get bit-identical aggregates for any worker count.

#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include <omp.h>

namespace sfflab {

inline int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int workers, Fn&& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
  const int threads = workers > 0 ? workers : default_workers();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      slots[idx].emplace(fn(idx));
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  // Report the failure with the lowest index so errors are deterministic too.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace sfflab
