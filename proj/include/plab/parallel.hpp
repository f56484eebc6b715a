#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace plab {

/// Evaluates fn(i) for i in [0, count) on up to `jobs` threads. Results are
/// stored by index, so the output does not depend on the schedule. The first
/// exception thrown by any task is rethrown after all workers join.
template <typename Fn>
auto parallel_map(std::size_t jobs, std::size_t count, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) slots[i].emplace(fn(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          slots[i].emplace(fn(i));
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      const std::size_t n = std::min(jobs, count);
      for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace plab
