#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "temporal_bell/core.hpp"
#include "temporal_bell/dyadic.hpp"

#include "json.hpp"

namespace temporal_bell::classical {

/// Macrorealist machine A_k = F_k(X_k, A_{k-1}): a two-valued state driven by
/// one 8-bit table per step.
///
/// Table byte layout: bit (2*X + b) is the output for code X and previous
/// state bit b, where state bit b = 0 means +1 and b = 1 means -1 (outputs use
/// the same convention). Full strategy encoding packs the table bytes
/// little-endian by step with the a0 bit on top:
///   encoding = a0_bit * 256^n + sum_k table_k * 256^k.
class GeneralStrategy {
 public:
  GeneralStrategy(int a0, std::vector<std::uint8_t> tables);
  static GeneralStrategy from_encoding(int n, std::uint64_t encoding);

  std::uint64_t encoding() const;
  int length() const { return static_cast<int>(tables_.size()); }
  int a0() const { return a0_; }
  std::uint8_t table(std::size_t k) const { return tables_.at(k); }

  /// Output of step `step_index` (0-based) for previous state a_prev and the
  /// given symbol; depends on nothing else.
  int step(std::size_t step_index, int a_prev, InputSymbol sym) const;

  /// Folds step over the whole sequence starting from a0.
  int run(const InputSequence& seq) const;

 private:
  int a0_;
  std::vector<std::uint8_t> tables_;
};

/// Sign-product strategy A_n = s0 * prod_k y_k c_k(x_k).
///
/// Encoding: bit 2k = (c_k(0) == -1), bit 2k+1 = (c_k(1) == -1), bit 2n = (s0 == -1).
class ReducedStrategy {
 public:
  ReducedStrategy(int s0, std::vector<std::array<int, 2>> c);
  static ReducedStrategy from_encoding(int n, std::uint64_t encoding);

  std::uint64_t encoding() const;
  int length() const { return static_cast<int>(c_.size()); }
  int s0() const { return s0_; }
  int c(std::size_t k, int xbit) const;

  int answer(const InputSequence& seq) const;

  /// Equivalent general strategy: the running sign product is the state, so
  /// a0 = s0 and F_k(X, a) = y * c_k(x) * a.
  GeneralStrategy to_general() const;

 private:
  int s0_;
  std::vector<std::array<int, 2>> c_;
};

enum class StrategySpace { reduced, general };

struct SearchResult {
  int n = 0;
  StrategySpace space = StrategySpace::reduced;
  Dyadic max_fidelity;
  std::uint64_t argmax_encoding = 0;
  std::uint64_t strategies_scanned = 0;
  std::int64_t elapsed_ms = 0;

  nlohmann::ordered_json to_json() const;
};

/// Exact fidelity of a reduced strategy; the y-sum is saturated analytically,
/// leaving s0 * sum over even-parity x of 2^(1-n) f(x) prod_k c_k(x_k).
Dyadic reduced_fidelity(const ReducedStrategy& strategy);

inline constexpr int kMaxReducedSearchN = 16;

/// Exhaustive maximum of reduced_fidelity over all 2*4^n reduced strategies.
/// Deterministic argmax: the smallest encoding among maximizers.
SearchResult reduced_search(int n, int threads = 1);

/// Exact classical bound 2^(1 - ceil(n/2)).
Dyadic classical_bound(int n);

/// Resume/progress state for the long brute-force scan. `chunks` marks
/// finished (a0, table_1) blocks; `best_num_raw` is the running maximum
/// numerator in units of 2^(1-2n).
struct BruteForceCheckpoint {
  int n = 0;
  std::array<std::uint64_t, 8> chunks{};  // 512-bit bitmap
  std::int64_t best_num_raw = 0;
  std::uint64_t best_encoding = 0;
  bool has_best = false;
  std::uint64_t scanned = 0;

  bool chunk_done(unsigned id) const { return (chunks[id >> 6] >> (id & 63)) & 1; }
  void mark_chunk(unsigned id) { chunks[id >> 6] |= 1ull << (id & 63); }

  nlohmann::ordered_json to_json() const;
  static BruteForceCheckpoint from_json(const nlohmann::json& j);
};

struct BruteForceOptions {
  bool allow_long = false;  // required for n = 4
  int threads = 1;
  const BruteForceCheckpoint* resume = nullptr;
  std::function<void(const BruteForceCheckpoint&)> on_chunk;  // called after each finished chunk
};

inline constexpr int kMaxBruteForceN = 4;

/// Exhaustive maximum of the exact fidelity over all 2*256^n general
/// strategies, evaluated bit-parallel over the promise-support sequences.
/// n <= 3 by default; n = 4 only with allow_long (checkpointable).
SearchResult brute_force_search(int n, const BruteForceOptions& options = {});

namespace detail {

/// Promise-support sequences for game length n (n <= 5), bit-packed one bit
/// per sequence. Sequence index: (xfree << n) | ybits, where the x-string is
/// xfree with a parity-fixing top bit.
struct SequenceTables {
  explicit SequenceTables(int n);

  int n;
  std::uint32_t num_x;     // 2^(n-1) even-parity x-strings
  std::uint64_t num_seq;   // 2^(2n-1)
  int words;

  std::vector<std::array<std::vector<std::uint64_t>, 4>> code_mask;  // [step][code][word]
  std::vector<std::uint64_t> sign_mask;    // bit set where prod_y * f(x) = -1
  std::vector<std::uint64_t> yprod_mask;   // bit set where prod_y = -1
  std::vector<std::uint64_t> used_mask;
  std::vector<std::vector<std::uint64_t>> xstring_mask;  // [xfree][word]
  std::vector<int> f_of_x;                               // f on each even x-string
};

/// Exact fidelity of one general strategy via the bit-parallel tables; the
/// independent slow route for cross-checking is GeneralStrategy::run under
/// fidelity_average.
Dyadic strategy_fidelity(const SequenceTables& tables, const GeneralStrategy& strategy);

}  // namespace detail

}  // namespace temporal_bell::classical
