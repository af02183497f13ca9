#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#include <omp.h>

namespace fsp {

/// Number of threads used when `jobs` <= 0.
inline int default_jobs() { return omp_get_max_threads(); }

/// Reference map over items, in order.
template <class T, class F>
auto map_serial(std::span<const T> items, F&& fn) {
  using R = std::invoke_result_t<F&, const T&>;
  std::vector<R> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(fn(item));
  return out;
}

/// Parallel map over items. Slot i always receives fn(items[i]), so a
/// subsequent in-order reduction is independent of `jobs`. The first
/// exception (by item index) is rethrown after the loop.
template <class T, class F>
auto map_parallel(std::span<const T> items, F&& fn, int jobs) {
  using R = std::invoke_result_t<F&, const T&>;
  const auto n = static_cast<std::ptrdiff_t>(items.size());
  std::vector<R> out(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  const int threads = jobs > 0 ? jobs : default_jobs();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(items[static_cast<std::size_t>(i)]);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// map_serial when jobs == 1, map_parallel otherwise.
template <class T, class F>
auto map_words(std::span<const T> items, F&& fn, int jobs) {
  if (jobs == 1) return map_serial(items, std::forward<F>(fn));
  return map_parallel(items, std::forward<F>(fn), jobs);
}

}  // namespace fsp
