#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "temporal_bell/dyadic.hpp"
#include "temporal_bell/errors.hpp"
#include "temporal_bell/rng.hpp"

#include "json.hpp"

namespace temporal_bell {

/// One step of classical input: a bit x and a sign bit y'.
/// Derived views: y = (-1)^y' and the combined code X = 2y' + x in {0,1,2,3}.
struct InputSymbol {
  std::uint8_t x = 0;
  std::uint8_t yprime = 0;

  constexpr int y() const { return yprime ? -1 : 1; }
  constexpr int code() const { return 2 * yprime + x; }

  friend constexpr bool operator==(const InputSymbol&, const InputSymbol&) = default;
};

/// Ordered inputs (x_1,y'_1)..(x_n,y'_n) for one run of the game, n >= 1.
class InputSequence {
 public:
  explicit InputSequence(std::vector<InputSymbol> symbols);

  /// Builds from packed bits: bit k-1 of xbits/ybits is x_k / y'_k. n <= 64.
  static InputSequence from_bits(int n, std::uint64_t xbits, std::uint64_t ybits);

  int length() const { return static_cast<int>(symbols_.size()); }
  const InputSymbol& operator[](std::size_t k) const { return symbols_[k]; }
  void set(std::size_t k, InputSymbol sym);

  auto begin() const { return symbols_.begin(); }
  auto end() const { return symbols_.end(); }

  int xsum() const;
  int parity() const { return xsum() & 1; }
  int y_product() const;

 private:
  std::vector<InputSymbol> symbols_;
};

/// Task value: +1/-1 on even x-parity, 0 on odd.
using TaskValue = int;

/// Evaluates prod_k y_k * cos(pi/2 * sum_k x_k) exactly in integer
/// arithmetic; the cosine factor is a (sum mod 4) lookup, never floating trig.
TaskValue task_function(const InputSequence& seq);

/// Weight of an x-string under the even-parity promise: 2^(1-n) when the bit
/// sum is even, else 0. Entries must be 0/1 and the string non-empty.
Dyadic promise_weight(std::span<const std::uint8_t> xs);

struct PromiseEntry {
  std::uint32_t xbits = 0;  // bit k-1 = x_k
  Dyadic weight;
};

/// All even-parity x-strings of length n with their exact weights.
class PromiseEnsemble {
 public:
  PromiseEnsemble(int n, std::vector<PromiseEntry> entries)
      : n_(n), entries_(std::move(entries)) {}

  int n() const { return n_; }
  const std::vector<PromiseEntry>& entries() const { return entries_; }
  std::string x_string(const PromiseEntry& e) const;

  nlohmann::ordered_json to_json() const;

 private:
  int n_;
  std::vector<PromiseEntry> entries_;
};

inline constexpr int kMaxPromiseN = 30;

/// Enumerates the 2^(n-1) promise-support strings, 1 <= n <= kMaxPromiseN.
PromiseEnsemble enumerate_promise(int n);

/// Draws one input sequence: n-1 free x-bits plus a parity-fixing last bit,
/// y' bits uniform and independent. Sample draw_index reads counters
/// {2*draw_index, 2*draw_index + 1}, so streams are reproducible and
/// partition-independent. n <= 64.
InputSequence sample_input(int n, const CounterRng& rng, std::uint64_t draw_index = 0);

using AnswerFn = std::function<int(const InputSequence&)>;

inline constexpr int kMaxExactFidelityN = 14;

/// Exact input-averaged product of answer with the task value,
///   sum_x sum_y 2^-n p(x) answer(seq) prod_l y_l cos(pi/2 sum_k x_k),
/// accumulated as an integer multiple of 2^(1-2n). Only promise-support
/// x-strings are visited (all others carry weight zero). The answer callback
/// must be pure; workers invoke it concurrently when threads > 1.
Dyadic fidelity_average(const AnswerFn& answer, int n, int threads = 1);

/// Monte-Carlo estimate of fidelity_average over `samples` promise draws.
double fidelity_monte_carlo(const AnswerFn& answer, int n, std::uint64_t samples,
                            const CounterRng& rng, int threads = 1);

}  // namespace temporal_bell
