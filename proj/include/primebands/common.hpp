#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace primebands {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

inline constexpr const char* kVersion = "0.1.0";

/// Thrown when an iterative numerical routine cannot reach the requested
/// tolerance; carries the error estimate it did reach.
class convergence_error : public std::runtime_error {
public:
  convergence_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error_(achieved) {}
  double achieved_error() const { return achieved_error_; }

private:
  double achieved_error_;
};

namespace detail {

// Neumaier-compensated accumulator: keeps absolute rounding error of a
// 1e8-term sum well below 1e-6.
struct neumaier_sum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + compensation; }
};

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Deterministic blocked reduction: [begin, end) is split into fixed-size
// blocks independent of the worker count, each block is evaluated by some
// worker, and the per-block results are combined strictly in block order.
// Output is therefore bit-identical for any `threads`.
template <typename Result, typename BlockFn, typename CombineFn>
Result blocked_reduce(u64 begin, u64 end, u64 block_size, unsigned threads,
                      Result init, BlockFn block_fn, CombineFn combine) {
  if (begin >= end) return init;
  if (block_size == 0) block_size = 1;
  const u64 n_blocks = (end - begin + block_size - 1) / block_size;
  std::vector<Result> results(static_cast<std::size_t>(n_blocks));

  auto run_block = [&](u64 b) {
    const u64 lo = begin + b * block_size;
    const u64 hi = std::min(end, lo + block_size);
    results[static_cast<std::size_t>(b)] = block_fn(lo, hi);
  };

  threads = resolve_threads(threads);
  if (threads <= 1 || n_blocks == 1) {
    for (u64 b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<u64> next{0};
    auto worker = [&] {
      for (;;) {
        u64 b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= n_blocks) return;
        run_block(b);
      }
    };
    std::vector<std::thread> pool;
    unsigned n = static_cast<unsigned>(std::min<u64>(threads, n_blocks));
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Result acc = init;
  for (u64 b = 0; b < n_blocks; ++b)
    acc = combine(acc, results[static_cast<std::size_t>(b)]);
  return acc;
}

// Common case: deterministic compensated sum of per-block partial sums.
template <typename BlockFn>
double blocked_sum(u64 begin, u64 end, u64 block_size, unsigned threads,
                   BlockFn block_fn) {
  neumaier_sum total = blocked_reduce(
      begin, end, block_size, threads, neumaier_sum{},
      [&](u64 lo, u64 hi) { return block_fn(lo, hi); },
      [](neumaier_sum acc, const neumaier_sum& part) {
        acc.add(part.value());
        return acc;
      });
  return total.value();
}

}  // namespace detail
}  // namespace primebands
