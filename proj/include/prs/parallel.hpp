#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

#include "prs/rng.hpp"

namespace prs {

// Runs fn(seed_i, i) for i in [0, count) with seed_i = derive_seed(base, i).
// Results are stored by index, so the outcome does not depend on scheduling.
template <class Fn>
auto run_batch(std::size_t count, std::uint64_t base_seed, Fn&& fn, unsigned threads = 0)
    -> std::vector<std::invoke_result_t<Fn&, std::uint64_t, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::uint64_t, std::size_t>;
  std::vector<Result> results(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned w) {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        results[i] = fn(derive_seed(base_seed, i), i);
    } catch (...) {
      errors[w] = std::current_exception();
      next.store(count);
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace prs
