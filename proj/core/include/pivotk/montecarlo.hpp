#pragma once

// Monte-Carlo plumbing: binomial estimates and a trial runner whose result
// does not depend on how trials are split across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pivotk {

struct McEstimate {
  double frequency = 0.0;
  double stderr_ = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;

  static McEstimate from_counts(std::uint64_t hits, std::uint64_t trials) {
    McEstimate e;
    e.trials = trials;
    e.hits = hits;
    if (trials == 0) return e;
    const double n = static_cast<double>(trials);
    e.frequency = static_cast<double>(hits) / n;
    e.stderr_ = std::sqrt(e.frequency * (1.0 - e.frequency) / n);
    e.ci_low = std::max(0.0, e.frequency - 1.96 * e.stderr_);
    e.ci_high = std::min(1.0, e.frequency + 1.96 * e.stderr_);
    return e;
  }
};

/// Worker count used by the trial runner; 0 selects hardware concurrency.
unsigned default_worker_count();

/// Runs body(trial) for trial in [0, trials) on up to `workers` threads and
/// sums the per-trial counters. body must be a pure function of its trial
/// index; counters are integers so the reduction is order independent.
template <std::size_t N, typename Body>
std::vector<std::uint64_t> count_trials(std::uint64_t trials, Body&& body, unsigned workers = 0) {
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, trials)));
  std::vector<std::uint64_t> total(N, 0);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto hits = body(i);
      for (std::size_t k = 0; k < N; ++k) total[k] += hits[k] ? 1 : 0;
    }
    return total;
  }
  std::mutex mutex;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::vector<std::uint64_t> local(N, 0);
      try {
        for (std::uint64_t i = w; i < trials; i += workers) {
          const auto hits = body(i);
          for (std::size_t k = 0; k < N; ++k) local[k] += hits[k] ? 1 : 0;
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::lock_guard lock(mutex);
      for (std::size_t k = 0; k < N; ++k) total[k] += local[k];
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return total;
}

}  // namespace pivotk
