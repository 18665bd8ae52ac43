#pragma once

// Internal helpers for the exhaustive search drivers: ranked multiset
// enumeration and index-space scans that give bit-identical results for the
// serial reference and the OpenMP path.

#include <atomic>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "sybilshare/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sybilshare::detail {

inline std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact at every step
  }
  return r;
}

// Non-decreasing index tuples of length k over [0, m), in lexicographic
// rank order. With values sorted descending this walks profiles from the
// all-largest corner downward.
struct MultisetSpace {
  std::size_t m = 0;
  std::size_t k = 0;
  std::uint64_t total = 1;

  MultisetSpace() = default;
  MultisetSpace(std::size_t m_, std::size_t k_) : m(m_), k(k_), total(binom(m_ + k_ - 1, k_)) {
    if (k_ == 0) total = 1;
  }

  void unrank(std::uint64_t rank, std::size_t* out) const {
    std::size_t lo = 0;
    for (std::size_t pos = 0; pos < k; ++pos) {
      const std::size_t rest = k - pos - 1;
      for (std::size_t v = lo; v < m; ++v) {
        const std::uint64_t cnt = rest == 0 ? 1 : binom((m - v) + rest - 1, rest);
        if (rank < cnt) {
          out[pos] = v;
          lo = v;
          break;
        }
        rank -= cnt;
      }
    }
  }
};

inline constexpr std::uint64_t kNoHit = std::numeric_limits<std::uint64_t>::max();

// First index where pred(i) holds, or `total` if none. The parallel path
// never skips indices below the current best hit, so the minimum is exact
// regardless of scheduling.
template <class Pred>
std::uint64_t scan_first_hit(std::uint64_t total, Exec exec, Pred&& pred) {
  if (total == 0) return 0;
#ifdef _OPENMP
  if (exec == Exec::parallel && total > 1024) {
    std::atomic<std::uint64_t> best{total};
#pragma omp parallel for schedule(dynamic, 256) num_threads(worker_count())
    for (long long i = 0; i < static_cast<long long>(total); ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      if (idx >= best.load(std::memory_order_relaxed)) continue;
      if (pred(idx)) {
        std::uint64_t cur = best.load(std::memory_order_relaxed);
        while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
        }
      }
    }
    return best.load();
  }
#else
  (void)exec;
#endif
  for (std::uint64_t i = 0; i < total; ++i) {
    if (pred(i)) return i;
  }
  return total;
}

}  // namespace sybilshare::detail
