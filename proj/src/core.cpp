#include "temporal_bell/core.hpp"

#include <bit>

#include "temporal_bell/parallel.hpp"

namespace temporal_bell {

InputSequence::InputSequence(std::vector<InputSymbol> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("InputSequence: empty sequence");
  for (const auto& s : symbols_) {
    if (s.x > 1 || s.yprime > 1) {
      throw std::invalid_argument("InputSequence: symbol fields must be bits");
    }
  }
}

InputSequence InputSequence::from_bits(int n, std::uint64_t xbits, std::uint64_t ybits) {
  if (n < 1 || n > 64) throw std::invalid_argument("InputSequence::from_bits: n out of range");
  std::vector<InputSymbol> symbols(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    symbols[static_cast<std::size_t>(k)] = {static_cast<std::uint8_t>((xbits >> k) & 1),
                                            static_cast<std::uint8_t>((ybits >> k) & 1)};
  }
  return InputSequence(std::move(symbols));
}

void InputSequence::set(std::size_t k, InputSymbol sym) {
  if (k >= symbols_.size()) throw std::invalid_argument("InputSequence::set: index out of range");
  if (sym.x > 1 || sym.yprime > 1) {
    throw std::invalid_argument("InputSequence::set: symbol fields must be bits");
  }
  symbols_[k] = sym;
}

int InputSequence::xsum() const {
  int s = 0;
  for (const auto& sym : symbols_) s += sym.x;
  return s;
}

int InputSequence::y_product() const {
  int p = 1;
  for (const auto& sym : symbols_) p *= sym.y();
  return p;
}

TaskValue task_function(const InputSequence& seq) {
  static constexpr int kCosQuarter[4] = {1, 0, -1, 0};
  return seq.y_product() * kCosQuarter[seq.xsum() & 3];
}

Dyadic promise_weight(std::span<const std::uint8_t> xs) {
  if (xs.empty()) throw std::invalid_argument("promise_weight: empty x-string");
  int sum = 0;
  for (auto b : xs) {
    if (b > 1) throw std::invalid_argument("promise_weight: entries must be bits");
    sum += b;
  }
  if (sum & 1) return Dyadic(0);
  return Dyadic(1, static_cast<int>(xs.size()) - 1);
}

std::string PromiseEnsemble::x_string(const PromiseEntry& e) const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int k = 0; k < n_; ++k) {
    if ((e.xbits >> k) & 1) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

nlohmann::ordered_json PromiseEnsemble::to_json() const {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    entries.push_back({{"x", x_string(e)},
                       {"weight_num", e.weight.num()},
                       {"weight_log2_den", e.weight.log2_den()}});
  }
  return {{"n", n_}, {"entries", std::move(entries)}};
}

PromiseEnsemble enumerate_promise(int n) {
  if (n < 1 || n > kMaxPromiseN) throw std::invalid_argument("enumerate_promise: n out of range");
  const std::uint32_t count = 1u << (n - 1);
  std::vector<PromiseEntry> entries;
  entries.reserve(count);
  const Dyadic weight(1, n - 1);
  for (std::uint32_t free = 0; free < count; ++free) {
    const std::uint32_t parity = static_cast<std::uint32_t>(std::popcount(free)) & 1u;
    entries.push_back({free | (parity << (n - 1)), weight});
  }
  return PromiseEnsemble(n, std::move(entries));
}

InputSequence sample_input(int n, const CounterRng& rng, std::uint64_t draw_index) {
  if (n < 1 || n > 64) throw std::invalid_argument("sample_input: n out of range");
  const std::uint64_t xword = rng.word(2 * draw_index);
  const std::uint64_t yword = rng.word(2 * draw_index + 1);
  std::uint64_t xbits = n == 1 ? 0 : (xword & ((1ull << (n - 1)) - 1));
  xbits |= (static_cast<std::uint64_t>(std::popcount(xbits)) & 1ull) << (n - 1);
  const std::uint64_t ybits = n == 64 ? yword : (yword & ((1ull << n) - 1));
  return InputSequence::from_bits(n, xbits, ybits);
}

Dyadic fidelity_average(const AnswerFn& answer, int n, int threads) {
  if (n < 1) throw std::invalid_argument("fidelity_average: n must be >= 1");
  if (n > kMaxExactFidelityN) {
    throw CapacityError("fidelity_average: exact enumeration supports n <= " +
                        std::to_string(kMaxExactFidelityN));
  }
  const std::uint64_t num_x = 1ull << (n - 1);
  const std::uint64_t num_y = 1ull << n;
  auto partial = [&](std::uint64_t begin, std::uint64_t end) -> std::int64_t {
    InputSequence seq = InputSequence::from_bits(n, 0, 0);
    std::int64_t sum = 0;
    for (std::uint64_t free = begin; free < end; ++free) {
      const std::uint64_t xbits =
          free | ((static_cast<std::uint64_t>(std::popcount(free)) & 1ull) << (n - 1));
      const int xsum = std::popcount(xbits);
      const int cosf = (xsum & 3) == 0 ? 1 : -1;  // xsum is even here
      for (std::uint64_t ybits = 0; ybits < num_y; ++ybits) {
        for (int k = 0; k < n; ++k) {
          seq.set(static_cast<std::size_t>(k),
                  {static_cast<std::uint8_t>((xbits >> k) & 1),
                   static_cast<std::uint8_t>((ybits >> k) & 1)});
        }
        const int sigma = (std::popcount(ybits) & 1) ? -cosf : cosf;
        sum += sigma * answer(seq);
      }
    }
    return sum;
  };
  std::int64_t total = 0;
  for (std::int64_t part : detail::run_blocks<std::int64_t>(num_x, threads, partial)) {
    total += part;
  }
  return Dyadic(total, 2 * n - 1);
}

double fidelity_monte_carlo(const AnswerFn& answer, int n, std::uint64_t samples,
                            const CounterRng& rng, int threads) {
  if (n < 1 || n > 64) throw std::invalid_argument("fidelity_monte_carlo: n out of range");
  if (samples == 0) throw std::invalid_argument("fidelity_monte_carlo: samples must be > 0");
  auto partial = [&](std::uint64_t begin, std::uint64_t end) -> std::int64_t {
    std::int64_t sum = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      const InputSequence seq = sample_input(n, rng, i);
      sum += answer(seq) * task_function(seq);
    }
    return sum;
  };
  std::int64_t total = 0;
  for (std::int64_t part : detail::run_blocks<std::int64_t>(samples, threads, partial)) {
    total += part;
  }
  return static_cast<double>(total) / static_cast<double>(samples);
}

}  // namespace temporal_bell
