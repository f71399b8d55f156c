#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "celerlog/model.hpp"

namespace celerlog {

// Raised when a work unit throws; names the unit that failed.
class WorkUnitError : public Error {
 public:
  WorkUnitError(const std::string& unit, const std::string& what)
      : Error(unit + ": " + what), unit_(unit) {}
  const std::string& unit() const { return unit_; }

 private:
  std::string unit_;
};

// Applies fn(i) for i in [0, count) on up to `workers` threads and returns the
// results in index order. With workers == 1 everything runs on the caller's
// thread. If any unit throws, the lowest failing index is reported as a
// WorkUnitError labelled by describe(i).
template <typename Fn>
auto parallel_map(std::size_t count, std::size_t workers, Fn&& fn,
                  const std::function<std::string(std::size_t)>& describe = {})
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using R = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);

  auto work = [&](std::size_t i) {
    try {
      slots[i].emplace(fn(i));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
      });
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    std::string label = describe ? describe(i) : "work unit " + std::to_string(i);
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw WorkUnitError(label, e.what());
    } catch (...) {
      throw WorkUnitError(label, "unknown exception");
    }
  }

  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Splits [0, count) into contiguous chunks and runs fn(begin, end) on each.
template <typename Fn>
void parallel_chunks(std::size_t count, std::size_t workers, Fn&& fn,
                     std::size_t min_chunk = 4096) {
  if (count == 0) return;
  std::size_t chunks = std::min(std::max<std::size_t>(1, workers) * 4,
                                (count + min_chunk - 1) / min_chunk);
  chunks = std::max<std::size_t>(1, chunks);
  const std::size_t per = (count + chunks - 1) / chunks;
  parallel_map(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * per;
    const std::size_t end = std::min(count, begin + per);
    if (begin < end) fn(begin, end);
    return 0;
  });
}

// Applies fn to every bucket on up to worker_count threads; results follow
// bucket order. A failing bucket is reported by its length.
template <typename Fn>
auto parallel_map_buckets(const std::vector<LogBucket>& buckets, std::size_t worker_count, Fn&& fn) {
  if (worker_count < 1) throw ConfigError("worker count must be at least 1");
  return parallel_map(
      buckets.size(), worker_count, [&](std::size_t i) { return fn(buckets[i]); },
      [&](std::size_t i) { return "bucket of length " + std::to_string(buckets[i].length); });
}

}  // namespace celerlog
