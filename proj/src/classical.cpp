#include "temporal_bell/classical.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <mutex>
#include <thread>

#include "temporal_bell/format.hpp"
#include "temporal_bell/parallel.hpp"

namespace temporal_bell::classical {

namespace {

std::int64_t ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
      .count();
}

int validate_sign(int v, const char* what) {
  if (v != 1 && v != -1) throw std::invalid_argument(std::string(what) + " must be +1 or -1");
  return v;
}

// Gathers bits 0,2,4,... of x into a contiguous low field.
std::uint32_t compress_even_bits(std::uint64_t x) {
  x &= 0x5555555555555555ull;
  x = (x | (x >> 1)) & 0x3333333333333333ull;
  x = (x | (x >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x >> 4)) & 0x00FF00FF00FF00FFull;
  x = (x | (x >> 8)) & 0x0000FFFF0000FFFFull;
  x = (x | (x >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(x);
}

constexpr int kCosQuarter[4] = {1, 0, -1, 0};

}  // namespace

GeneralStrategy::GeneralStrategy(int a0, std::vector<std::uint8_t> tables)
    : a0_(validate_sign(a0, "GeneralStrategy a0")), tables_(std::move(tables)) {
  if (tables_.empty()) throw std::invalid_argument("GeneralStrategy: no step tables");
}

GeneralStrategy GeneralStrategy::from_encoding(int n, std::uint64_t encoding) {
  if (n < 1 || n > 7) throw std::invalid_argument("GeneralStrategy::from_encoding: n out of range");
  if (encoding >= (2ull << (8 * n))) {
    throw std::invalid_argument("GeneralStrategy::from_encoding: encoding out of range");
  }
  std::vector<std::uint8_t> tables(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    tables[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(encoding >> (8 * k));
  }
  return GeneralStrategy(((encoding >> (8 * n)) & 1) ? -1 : 1, std::move(tables));
}

std::uint64_t GeneralStrategy::encoding() const {
  std::uint64_t e = a0_ == -1 ? (1ull << (8 * length())) : 0;
  for (int k = 0; k < length(); ++k) {
    e |= static_cast<std::uint64_t>(tables_[static_cast<std::size_t>(k)]) << (8 * k);
  }
  return e;
}

int GeneralStrategy::step(std::size_t step_index, int a_prev, InputSymbol sym) const {
  if (step_index >= tables_.size()) {
    throw std::invalid_argument("GeneralStrategy::step: step index out of range");
  }
  validate_sign(a_prev, "GeneralStrategy::step a_prev");
  const int bit = (tables_[step_index] >> (2 * sym.code() + (a_prev == -1 ? 1 : 0))) & 1;
  return bit ? -1 : 1;
}

int GeneralStrategy::run(const InputSequence& seq) const {
  if (seq.length() != length()) {
    throw std::invalid_argument("GeneralStrategy::run: sequence length mismatch");
  }
  int a = a0_;
  for (std::size_t k = 0; k < tables_.size(); ++k) a = step(k, a, seq[k]);
  return a;
}

ReducedStrategy::ReducedStrategy(int s0, std::vector<std::array<int, 2>> c)
    : s0_(validate_sign(s0, "ReducedStrategy s0")), c_(std::move(c)) {
  if (c_.empty()) throw std::invalid_argument("ReducedStrategy: no sign tables");
  for (const auto& ck : c_) {
    validate_sign(ck[0], "ReducedStrategy c");
    validate_sign(ck[1], "ReducedStrategy c");
  }
}

ReducedStrategy ReducedStrategy::from_encoding(int n, std::uint64_t encoding) {
  if (n < 1 || n > 31) throw std::invalid_argument("ReducedStrategy::from_encoding: n out of range");
  if (encoding >= (2ull << (2 * n))) {
    throw std::invalid_argument("ReducedStrategy::from_encoding: encoding out of range");
  }
  std::vector<std::array<int, 2>> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    c[static_cast<std::size_t>(k)] = {((encoding >> (2 * k)) & 1) ? -1 : 1,
                                      ((encoding >> (2 * k + 1)) & 1) ? -1 : 1};
  }
  return ReducedStrategy(((encoding >> (2 * n)) & 1) ? -1 : 1, std::move(c));
}

std::uint64_t ReducedStrategy::encoding() const {
  std::uint64_t e = s0_ == -1 ? (1ull << (2 * length())) : 0;
  for (int k = 0; k < length(); ++k) {
    const auto& ck = c_[static_cast<std::size_t>(k)];
    if (ck[0] == -1) e |= 1ull << (2 * k);
    if (ck[1] == -1) e |= 1ull << (2 * k + 1);
  }
  return e;
}

int ReducedStrategy::c(std::size_t k, int xbit) const {
  if (k >= c_.size()) throw std::invalid_argument("ReducedStrategy::c: step index out of range");
  if (xbit != 0 && xbit != 1) throw std::invalid_argument("ReducedStrategy::c: xbit must be a bit");
  return c_[k][static_cast<std::size_t>(xbit)];
}

int ReducedStrategy::answer(const InputSequence& seq) const {
  if (seq.length() != length()) {
    throw std::invalid_argument("ReducedStrategy::answer: sequence length mismatch");
  }
  int a = s0_;
  for (std::size_t k = 0; k < c_.size(); ++k) a *= seq[k].y() * c_[k][seq[k].x];
  return a;
}

GeneralStrategy ReducedStrategy::to_general() const {
  std::vector<std::uint8_t> tables(static_cast<std::size_t>(length()));
  for (std::size_t k = 0; k < tables.size(); ++k) {
    std::uint8_t t = 0;
    for (int code = 0; code < 4; ++code) {
      const int y = (code & 2) ? -1 : 1;
      const int v = y * c_[k][static_cast<std::size_t>(code & 1)];
      // out(X, +1) = v at bit 2X, out(X, -1) = -v at bit 2X+1
      if (v == -1) t |= static_cast<std::uint8_t>(1u << (2 * code));
      if (v == 1) t |= static_cast<std::uint8_t>(1u << (2 * code + 1));
    }
    tables[k] = t;
  }
  return GeneralStrategy(s0_, std::move(tables));
}

nlohmann::ordered_json SearchResult::to_json() const {
  return {{"n", n},
          {"space", space == StrategySpace::reduced ? "reduced" : "general"},
          {"max_fidelity_num", max_fidelity.num()},
          {"max_fidelity_log2_den", max_fidelity.log2_den()},
          {"argmax_encoding", to_hex(argmax_encoding)},
          {"scanned", strategies_scanned},
          {"elapsed_ms", elapsed_ms}};
}

Dyadic reduced_fidelity(const ReducedStrategy& strategy) {
  const int n = strategy.length();
  if (n > kMaxPromiseN) throw CapacityError("reduced_fidelity: game length too large");
  const std::uint32_t num_x = 1u << (n - 1);
  std::int64_t sum = 0;
  for (std::uint32_t free = 0; free < num_x; ++free) {
    const std::uint32_t xbits = free | ((static_cast<std::uint32_t>(std::popcount(free)) & 1u)
                                        << (n - 1));
    const int xsum = std::popcount(xbits);
    int term = kCosQuarter[xsum & 3];
    for (int k = 0; k < n; ++k) term *= strategy.c(static_cast<std::size_t>(k), (xbits >> k) & 1);
    sum += term;
  }
  return Dyadic(strategy.s0() * sum, n - 1);
}

Dyadic classical_bound(int n) {
  if (n < 1) throw std::invalid_argument("classical_bound: n must be >= 1");
  if (n > 120) throw CapacityError("classical_bound: n too large for exact representation");
  return Dyadic(1, (n + 1) / 2 - 1);
}

SearchResult reduced_search(int n, int threads) {
  if (n < 1) throw std::invalid_argument("reduced_search: n must be >= 1");
  if (n > kMaxReducedSearchN) {
    throw CapacityError("reduced_search: exhaustive scan supports n <= " +
                        std::to_string(kMaxReducedSearchN));
  }
  const auto start = std::chrono::steady_clock::now();

  // Walsh spectrum of f restricted to even-parity strings:
  //   h[w] = sum_x f(x) (-1)^(x.w).
  // A strategy with sign-flip pattern w has fidelity s0 * prod_k c_k(0) * h[w] / 2^(n-1).
  std::vector<std::int32_t> h(1ull << n, 0);
  for (std::uint64_t x = 0; x < h.size(); ++x) {
    h[x] = static_cast<std::int32_t>(kCosQuarter[std::popcount(x) & 3]);
  }
  for (std::size_t len = 1; len < h.size(); len <<= 1) {
    for (std::size_t i = 0; i < h.size(); i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const std::int32_t a = h[j];
        const std::int32_t b = h[j + len];
        h[j] = a + b;
        h[j + len] = a - b;
      }
    }
  }

  struct Best {
    std::int64_t num = 0;
    std::uint64_t enc = 0;
    bool has = false;
  };
  const std::uint64_t total = 2ull << (2 * n);
  const std::uint64_t even_mask = 0x5555555555555555ull & ((1ull << (2 * n)) - 1);
  const std::uint64_t table_mask = (1ull << (2 * n)) - 1;
  auto scan = [&](std::uint64_t begin, std::uint64_t end) -> Best {
    Best best;
    for (std::uint64_t e = begin; e < end; ++e) {
      const std::uint64_t ce = e & table_mask;
      const std::uint64_t zeros = ce & even_mask;
      const std::uint32_t w = compress_even_bits((ce ^ (ce >> 1)) & even_mask);
      const unsigned neg = (static_cast<unsigned>(e >> (2 * n)) ^
                            static_cast<unsigned>(std::popcount(zeros))) & 1u;
      const std::int64_t num = neg ? -h[w] : h[w];
      if (!best.has || num > best.num || (num == best.num && e < best.enc)) {
        best = {num, e, true};
      }
    }
    return best;
  };
  Best best;
  for (const Best& b : temporal_bell::detail::run_blocks<Best>(total, threads, scan)) {
    if (!b.has) continue;
    if (!best.has || b.num > best.num || (b.num == best.num && b.enc < best.enc)) best = b;
  }

  SearchResult result;
  result.n = n;
  result.space = StrategySpace::reduced;
  result.max_fidelity = Dyadic(best.num, n - 1);
  result.argmax_encoding = best.enc;
  result.strategies_scanned = total;
  result.elapsed_ms = ms_since(start);
  return result;
}

namespace detail {

SequenceTables::SequenceTables(int game_length) : n(game_length) {
  if (n < 1 || n > 5) throw std::invalid_argument("SequenceTables: n out of range");
  num_x = 1u << (n - 1);
  num_seq = 1ull << (2 * n - 1);
  words = static_cast<int>((num_seq + 63) / 64);
  const auto zeroed = std::vector<std::uint64_t>(static_cast<std::size_t>(words), 0);
  code_mask.assign(static_cast<std::size_t>(n), {zeroed, zeroed, zeroed, zeroed});
  sign_mask = zeroed;
  yprod_mask = zeroed;
  used_mask = zeroed;
  xstring_mask.assign(num_x, zeroed);
  f_of_x.assign(num_x, 0);

  const std::uint32_t num_y = 1u << n;
  for (std::uint32_t free = 0; free < num_x; ++free) {
    const std::uint32_t xbits = free | ((static_cast<std::uint32_t>(std::popcount(free)) & 1u)
                                        << (n - 1));
    const int f = kCosQuarter[std::popcount(xbits) & 3];
    f_of_x[free] = f;
    for (std::uint32_t ybits = 0; ybits < num_y; ++ybits) {
      const std::uint64_t s = (static_cast<std::uint64_t>(free) << n) | ybits;
      const std::size_t word = static_cast<std::size_t>(s >> 6);
      const std::uint64_t bit = 1ull << (s & 63);
      used_mask[word] |= bit;
      xstring_mask[free][word] |= bit;
      const int ypar = std::popcount(ybits) & 1;
      if (ypar) yprod_mask[word] |= bit;
      if ((ypar ? -f : f) < 0) sign_mask[word] |= bit;
      for (int k = 0; k < n; ++k) {
        const int code = 2 * static_cast<int>((ybits >> k) & 1) + static_cast<int>((xbits >> k) & 1);
        code_mask[static_cast<std::size_t>(k)][static_cast<std::size_t>(code)][word] |= bit;
      }
    }
  }
}

Dyadic strategy_fidelity(const SequenceTables& tables, const GeneralStrategy& strategy) {
  if (strategy.length() != tables.n) {
    throw std::invalid_argument("strategy_fidelity: strategy length mismatch");
  }
  const int words = tables.words;
  std::vector<std::uint64_t> state(static_cast<std::size_t>(words),
                                   strategy.a0() == -1 ? ~0ull : 0ull);
  std::vector<std::uint64_t> next(static_cast<std::size_t>(words));
  for (int k = 0; k < tables.n; ++k) {
    const unsigned t = strategy.table(static_cast<std::size_t>(k));
    std::fill(next.begin(), next.end(), 0ull);
    for (int code = 0; code < 4; ++code) {
      const std::uint64_t m0 = -static_cast<std::uint64_t>((t >> (2 * code)) & 1u);
      const std::uint64_t m1 = -static_cast<std::uint64_t>((t >> (2 * code + 1)) & 1u);
      const auto& cm = tables.code_mask[static_cast<std::size_t>(k)][static_cast<std::size_t>(code)];
      for (int w = 0; w < words; ++w) {
        next[static_cast<std::size_t>(w)] |=
            cm[static_cast<std::size_t>(w)] &
            ((m0 & ~state[static_cast<std::size_t>(w)]) | (m1 & state[static_cast<std::size_t>(w)]));
      }
    }
    state = next;
  }
  std::int64_t disagree = 0;
  for (int w = 0; w < words; ++w) {
    disagree += std::popcount((state[static_cast<std::size_t>(w)] ^
                               tables.sign_mask[static_cast<std::size_t>(w)]) &
                              tables.used_mask[static_cast<std::size_t>(w)]);
  }
  return Dyadic(static_cast<std::int64_t>(tables.num_seq) - 2 * disagree, 2 * tables.n - 1);
}

}  // namespace detail

namespace {

struct ScanBest {
  std::int64_t num = 0;
  std::uint64_t enc = 0;
  bool has = false;

  void offer(std::int64_t n, std::uint64_t e) {
    if (!has || n > num || (n == num && e < enc)) {
      num = n;
      enc = e;
      has = true;
    }
  }
  void merge(const ScanBest& o) {
    if (o.has) offer(o.num, o.enc);
  }
};

// Hot scan kernel with a compile-time word count (1 word covers n <= 3,
// 2 words cover n = 4).
template <int W>
struct BruteKernel {
  int n = 0;
  std::uint64_t num_seq = 0;
  std::uint64_t used[W] = {};
  std::uint64_t sign[W] = {};
  std::uint64_t cm[4][4][W] = {};  // [step][code][word]

  explicit BruteKernel(const detail::SequenceTables& t) : n(t.n), num_seq(t.num_seq) {
    for (int w = 0; w < W; ++w) {
      used[w] = t.used_mask[static_cast<std::size_t>(w)];
      sign[w] = t.sign_mask[static_cast<std::size_t>(w)];
      for (int k = 0; k < n; ++k) {
        for (int code = 0; code < 4; ++code) {
          cm[k][code][w] =
              t.code_mask[static_cast<std::size_t>(k)][static_cast<std::size_t>(code)]
                         [static_cast<std::size_t>(w)];
        }
      }
    }
  }

  inline void apply(int k, unsigned t, std::uint64_t (&s)[W]) const {
    std::uint64_t out[W] = {};
    for (int code = 0; code < 4; ++code) {
      const std::uint64_t m0 = -static_cast<std::uint64_t>((t >> (2 * code)) & 1u);
      const std::uint64_t m1 = -static_cast<std::uint64_t>((t >> (2 * code + 1)) & 1u);
      for (int w = 0; w < W; ++w) out[w] |= cm[k][code][w] & ((m0 & ~s[w]) | (m1 & s[w]));
    }
    for (int w = 0; w < W; ++w) s[w] = out[w];
  }

  inline std::int64_t score(const std::uint64_t (&s)[W]) const {
    int disagree = 0;
    for (int w = 0; w < W; ++w) disagree += std::popcount((s[w] ^ sign[w]) & used[w]);
    return static_cast<std::int64_t>(num_seq) - 2 * disagree;
  }

  void scan_tail(int k, std::uint64_t enc_base, const std::uint64_t (&s)[W],
                 ScanBest& best) const {
    if (k == n) {
      best.offer(score(s), enc_base);
      return;
    }
    for (unsigned t = 0; t < 256; ++t) {
      std::uint64_t ns[W];
      for (int w = 0; w < W; ++w) ns[w] = s[w];
      apply(k, t, ns);
      scan_tail(k + 1, enc_base + (static_cast<std::uint64_t>(t) << (8 * k)), ns, best);
    }
  }

  ScanBest scan_chunk(unsigned chunk) const {
    const unsigned a0bit = chunk >> 8;
    const unsigned t0 = chunk & 255u;
    std::uint64_t s[W];
    for (int w = 0; w < W; ++w) s[w] = a0bit ? used[w] : 0ull;
    apply(0, t0, s);
    ScanBest best;
    scan_tail(1, (static_cast<std::uint64_t>(a0bit) << (8 * n)) | t0, s, best);
    return best;
  }
};

template <int W>
void run_brute_chunks(const detail::SequenceTables& tables, const BruteForceOptions& options,
                      BruteForceCheckpoint& state, std::vector<ScanBest>& chunk_best) {
  const BruteKernel<W> kernel(tables);
  const std::uint64_t per_chunk = 1ull << (8 * (tables.n - 1));
  std::atomic<unsigned> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const unsigned chunk = next.fetch_add(1);
      if (chunk >= 512) return;
      if (state.chunk_done(chunk)) continue;
      const ScanBest best = kernel.scan_chunk(chunk);
      std::lock_guard<std::mutex> lock(mu);
      chunk_best[chunk] = best;
      state.mark_chunk(chunk);
      state.scanned += per_chunk;
      if (best.has &&
          (!state.has_best || best.num > state.best_num_raw ||
           (best.num == state.best_num_raw && best.enc < state.best_encoding))) {
        state.best_num_raw = best.num;
        state.best_encoding = best.enc;
        state.has_best = true;
      }
      if (options.on_chunk) options.on_chunk(state);
    }
  };
  const int threads = options.threads < 1 ? 1 : options.threads;
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
}

}  // namespace

nlohmann::ordered_json BruteForceCheckpoint::to_json() const {
  nlohmann::ordered_json chunk_words = nlohmann::ordered_json::array();
  for (std::uint64_t w : chunks) chunk_words.push_back(to_hex(w));
  return {{"n", n},
          {"chunks", std::move(chunk_words)},
          {"best_num_raw", best_num_raw},
          {"best_encoding", to_hex(best_encoding)},
          {"has_best", has_best},
          {"scanned", scanned}};
}

BruteForceCheckpoint BruteForceCheckpoint::from_json(const nlohmann::json& j) {
  BruteForceCheckpoint ck;
  ck.n = j.at("n").get<int>();
  const auto& words = j.at("chunks");
  if (words.size() != ck.chunks.size()) {
    throw std::invalid_argument("BruteForceCheckpoint: bad chunk bitmap");
  }
  for (std::size_t i = 0; i < ck.chunks.size(); ++i) {
    ck.chunks[i] = from_hex(words[i].get<std::string>());
  }
  ck.best_num_raw = j.at("best_num_raw").get<std::int64_t>();
  ck.best_encoding = from_hex(j.at("best_encoding").get<std::string>());
  ck.has_best = j.at("has_best").get<bool>();
  ck.scanned = j.at("scanned").get<std::uint64_t>();
  return ck;
}

SearchResult brute_force_search(int n, const BruteForceOptions& options) {
  if (n < 1) throw std::invalid_argument("brute_force_search: n must be >= 1");
  if (n > kMaxBruteForceN) {
    throw CapacityError("brute_force_search: full scan supports n <= " +
                        std::to_string(kMaxBruteForceN));
  }
  if (n == kMaxBruteForceN && !options.allow_long) {
    throw CapacityError(
        "brute_force_search: n = 4 scans 2*256^4 strategies; pass allow_long to run it");
  }
  const auto start = std::chrono::steady_clock::now();

  BruteForceCheckpoint state;
  if (options.resume != nullptr) {
    if (options.resume->n != n) {
      throw std::invalid_argument("brute_force_search: checkpoint is for a different n");
    }
    state = *options.resume;
  } else {
    state.n = n;
  }

  const detail::SequenceTables tables(n);
  std::vector<ScanBest> chunk_best(512);
  if (n <= 3) {
    run_brute_chunks<1>(tables, options, state, chunk_best);
  } else {
    run_brute_chunks<2>(tables, options, state, chunk_best);
  }

  SearchResult result;
  result.n = n;
  result.space = StrategySpace::general;
  result.max_fidelity = Dyadic(state.best_num_raw, 2 * n - 1);
  result.argmax_encoding = state.best_encoding;
  result.strategies_scanned = state.scanned;
  result.elapsed_ms = ms_since(start);
  return result;
}

}  // namespace temporal_bell::classical
