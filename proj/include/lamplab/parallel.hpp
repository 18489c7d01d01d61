#pragma once
// Trial farming. Each trial is a pure function of its index (seeding comes
// from (seed, experiment, trial) streams), so results are deterministic and
// order-independent regardless of how many workers run them.

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lamplab {

// Runs fn(trial) for trial in [0, trials) and returns results indexed by
// trial. workers <= 1 runs inline; otherwise a small pull-based pool.
template <typename Fn>
auto run_trials(std::int64_t trials, int workers, Fn&& fn)
    -> std::vector<decltype(fn(std::int64_t{0}))> {
  using T = decltype(fn(std::int64_t{0}));
  if (trials < 0) throw std::invalid_argument("run_trials: trials < 0");
  std::vector<T> out(static_cast<std::size_t>(trials));
  if (workers <= 1 || trials <= 1) {
    for (std::int64_t i = 0; i < trials; ++i)
      out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  auto drain = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= trials) return;
      out[static_cast<std::size_t>(i)] = fn(i);
    }
  };
  int nthr = workers;
  if (nthr > static_cast<int>(trials)) nthr = static_cast<int>(trials);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthr) - 1);
  for (int w = 1; w < nthr; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace lamplab
