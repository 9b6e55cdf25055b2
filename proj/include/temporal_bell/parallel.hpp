#pragma once

#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace temporal_bell::detail {

/// Splits [0, total) into one contiguous block per worker and returns the
/// per-block results in block order, so callers can combine them with a
/// fixed-order reduction that does not depend on scheduling.
template <typename R, typename Fn>
std::vector<R> run_blocks(std::uint64_t total, int threads, Fn&& fn) {
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  const std::uint64_t nblocks =
      total < static_cast<std::uint64_t>(threads) ? (total == 0 ? 1 : total)
                                                  : static_cast<std::uint64_t>(threads);
  std::vector<R> results(nblocks);
  if (nblocks == 1) {
    results[0] = fn(std::uint64_t{0}, total);
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(nblocks);
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    const std::uint64_t begin = total * b / nblocks;
    const std::uint64_t end = total * (b + 1) / nblocks;
    pool.emplace_back([&results, &fn, b, begin, end] { results[b] = fn(begin, end); });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace temporal_bell::detail
