#pragma once

#include <atomic>
#include <cstdint>

namespace zovr {

enum class QueryPhase { kOuter, kInner };

/// Exact tally of component-function evaluations. Each f_i evaluation on a
/// metered objective adds exactly one; there is no caching anywhere in the
/// evaluation path, so the total is the true query count.
class QueryMeter {
 public:
  void record(std::int64_t count = 1) noexcept {
    total_.fetch_add(count, std::memory_order_relaxed);
    if (phase_.load(std::memory_order_relaxed) == QueryPhase::kOuter) {
      outer_.fetch_add(count, std::memory_order_relaxed);
    } else {
      inner_.fetch_add(count, std::memory_order_relaxed);
    }
  }

  // Phase labelling is advisory bookkeeping for reports; single writer.
  void set_phase(QueryPhase phase) noexcept {
    phase_.store(phase, std::memory_order_relaxed);
  }

  std::int64_t total() const noexcept {
    return total_.load(std::memory_order_relaxed);
  }

  std::int64_t phase_total(QueryPhase phase) const noexcept {
    return phase == QueryPhase::kOuter
               ? outer_.load(std::memory_order_relaxed)
               : inner_.load(std::memory_order_relaxed);
  }

  void reset() noexcept {
    total_.store(0, std::memory_order_relaxed);
    outer_.store(0, std::memory_order_relaxed);
    inner_.store(0, std::memory_order_relaxed);
    phase_.store(QueryPhase::kOuter, std::memory_order_relaxed);
  }

 private:
  std::atomic<std::int64_t> total_{0};
  std::atomic<std::int64_t> outer_{0};
  std::atomic<std::int64_t> inner_{0};
  std::atomic<QueryPhase> phase_{QueryPhase::kOuter};
};

}  // namespace zovr
