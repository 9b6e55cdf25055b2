#include "temporal_bell/inequalities.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "temporal_bell/classical.hpp"
#include "temporal_bell/parallel.hpp"

namespace temporal_bell::inequalities {

using quantum::BlochState;
using quantum::MeasurementDirection;

namespace {

std::int64_t ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
      .count();
}

MeasurementDirection dir_from_angles(double theta, double phi) {
  const double st = std::sin(theta);
  return MeasurementDirection(st * std::cos(phi), st * std::sin(phi), std::cos(theta));
}

// Deterministic 12x24 polar/azimuthal lattice; poles are avoided by the
// half-step offset so every lattice point is a distinct direction.
struct Lattice {
  static constexpr int kPolar = 12;
  static constexpr int kAzimuth = 24;
  static constexpr int kSize = kPolar * kAzimuth;

  std::vector<std::array<double, 2>> angles;
  std::vector<MeasurementDirection> points;

  Lattice() {
    angles.reserve(kSize);
    points.reserve(kSize);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < kPolar; ++i) {
      const double theta = pi * (i + 0.5) / kPolar;
      for (int j = 0; j < kAzimuth; ++j) {
        const double phi = 2.0 * pi * j / kAzimuth;
        angles.push_back({theta, phi});
        points.push_back(dir_from_angles(theta, phi));
      }
    }
  }
};

const Lattice& lattice() {
  static const Lattice grid;
  return grid;
}

template <typename F>
std::pair<double, double> golden_max(const F& f, double lo, double hi, double tol) {
  constexpr double gr = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Cyclic golden-section ascent over all angles; never moves downhill.
template <typename Objective>
double refine_angles(std::vector<double>& angles, const Objective& objective) {
  const double bracket = 0.27;  // a little over the lattice spacing
  double best = objective(angles);
  for (int cycle = 0; cycle < 200; ++cycle) {
    double gain = 0.0;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      auto line = [&](double t) {
        std::vector<double> tmp = angles;
        tmp[i] = t;
        return objective(tmp);
      };
      const auto [x, fx] =
          golden_max(line, angles[i] - bracket, angles[i] + bracket, kRefineStepTolerance);
      if (fx > best) {
        gain += fx - best;
        best = fx;
        angles[i] = x;
      }
    }
    if (gain < 1e-13) break;
  }
  return best;
}

nlohmann::ordered_json dir_json(const MeasurementDirection& d) {
  return nlohmann::ordered_json::array({d[0], d[1], d[2]});
}

constexpr int kCosQuarter[4] = {1, 0, -1, 0};

}  // namespace

double chsh_temporal(const Correlator2& E, const ChshSettings& s) {
  return E(s.a1, s.b1) + E(s.a1, s.b2) + E(s.a2, s.b1) - E(s.a2, s.b2);
}

double mermin_temporal(const Correlator3& E3, const MerminSettings& s) {
  return E3(s.a1, s.b1, s.c2) + E3(s.a1, s.b2, s.c1) + E3(s.a2, s.b1, s.c1) -
         E3(s.a2, s.b2, s.c2);
}

nlohmann::ordered_json InequalityReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["n"] = n ? nlohmann::ordered_json(*n) : nlohmann::ordered_json(nullptr);
  j["lhs"] = lhs;
  j["bound"] = bound;
  j["violated"] = violated;
  j["witness"] = witness;
  return j;
}

InequalityReport maximize_chsh(const Correlator2& E, int threads) {
  const Lattice& grid = lattice();
  const int g = Lattice::kSize;

  // Stage 1: exact maximum over the full lattice product. The four value
  // matrices make the (a1, a2) maximizations independent for fixed (b1, b2),
  // so the g^4 product collapses to two g^3 passes.
  std::vector<double> m11(static_cast<std::size_t>(g) * g), m12(m11.size()), m21(m11.size()),
      m22(m11.size());
  detail::run_blocks<int>(static_cast<std::uint64_t>(g), threads,
                          [&](std::uint64_t begin, std::uint64_t end) {
                            for (std::uint64_t a = begin; a < end; ++a) {
                              for (int b = 0; b < g; ++b) {
                                const std::size_t at = a * g + static_cast<std::size_t>(b);
                                m11[at] = E(grid.points[a], grid.points[b]);
                                m12[at] = m11[at];
                                m21[at] = m11[at];
                                m22[at] = m11[at];
                              }
                            }
                            return 0;
                          });

  double grid_best = 0.0;
  int best_a1 = 0, best_a2 = 0, best_b1 = 0, best_b2 = 0;
  bool first = true;
  std::vector<double> r(m11.size()), q(m11.size());
  std::vector<int> ra(m11.size()), qa(m11.size());
  for (int b1 = 0; b1 < g; ++b1) {
    for (int b2 = 0; b2 < g; ++b2) {
      const std::size_t at = static_cast<std::size_t>(b1) * g + b2;
      double rbest = 0.0, qbest = 0.0;
      int rarg = 0, qarg = 0;
      for (int a = 0; a < g; ++a) {
        const double rv = m11[static_cast<std::size_t>(a) * g + b1] +
                          m12[static_cast<std::size_t>(a) * g + b2];
        const double qv = m21[static_cast<std::size_t>(a) * g + b1] -
                          m22[static_cast<std::size_t>(a) * g + b2];
        if (a == 0 || rv > rbest) {
          rbest = rv;
          rarg = a;
        }
        if (a == 0 || qv > qbest) {
          qbest = qv;
          qarg = a;
        }
      }
      r[at] = rbest;
      ra[at] = rarg;
      q[at] = qbest;
      qa[at] = qarg;
      const double v = rbest + qbest;
      if (first || v > grid_best) {
        first = false;
        grid_best = v;
        best_b1 = b1;
        best_b2 = b2;
        best_a1 = rarg;
        best_a2 = qarg;
      }
    }
  }

  // Stage 2: local refinement from the lattice optimum.
  std::vector<double> angles = {grid.angles[static_cast<std::size_t>(best_a1)][0],
                                grid.angles[static_cast<std::size_t>(best_a1)][1],
                                grid.angles[static_cast<std::size_t>(best_a2)][0],
                                grid.angles[static_cast<std::size_t>(best_a2)][1],
                                grid.angles[static_cast<std::size_t>(best_b1)][0],
                                grid.angles[static_cast<std::size_t>(best_b1)][1],
                                grid.angles[static_cast<std::size_t>(best_b2)][0],
                                grid.angles[static_cast<std::size_t>(best_b2)][1]};
  auto objective = [&](const std::vector<double>& a) {
    const ChshSettings s{dir_from_angles(a[0], a[1]), dir_from_angles(a[2], a[3]),
                         dir_from_angles(a[4], a[5]), dir_from_angles(a[6], a[7])};
    return chsh_temporal(E, s);
  };
  const double lhs = refine_angles(angles, objective);

  InequalityReport report;
  report.name = "chsh";
  report.lhs = lhs;
  report.bound = 2.0;
  report.violated = lhs > report.bound + kViolationTolerance;
  report.witness = {{"a1", dir_json(dir_from_angles(angles[0], angles[1]))},
                    {"a2", dir_json(dir_from_angles(angles[2], angles[3]))},
                    {"b1", dir_json(dir_from_angles(angles[4], angles[5]))},
                    {"b2", dir_json(dir_from_angles(angles[6], angles[7]))},
                    {"grid_lhs", grid_best}};
  return report;
}

InequalityReport maximize_mermin(const Correlator3& E3, int threads) {
  const Lattice& grid = lattice();
  constexpr int kStarts = 60;

  struct StartResult {
    double value = 0.0;
    std::vector<double> angles;
  };

  auto run_start = [&](int start) -> StartResult {
    std::array<int, 6> idx{};
    for (int d = 0; d < 6; ++d) idx[static_cast<std::size_t>(d)] = (131 * start + 47 * d) % Lattice::kSize;
    auto value_of = [&](const std::array<int, 6>& ix) {
      const MerminSettings s{grid.points[static_cast<std::size_t>(ix[0])],
                             grid.points[static_cast<std::size_t>(ix[1])],
                             grid.points[static_cast<std::size_t>(ix[2])],
                             grid.points[static_cast<std::size_t>(ix[3])],
                             grid.points[static_cast<std::size_t>(ix[4])],
                             grid.points[static_cast<std::size_t>(ix[5])]};
      return mermin_temporal(E3, s);
    };
    double best = value_of(idx);
    for (int cycle = 0; cycle < 60; ++cycle) {
      bool improved = false;
      for (int d = 0; d < 6; ++d) {
        std::array<int, 6> probe = idx;
        for (int p = 0; p < Lattice::kSize; ++p) {
          probe[static_cast<std::size_t>(d)] = p;
          const double v = value_of(probe);
          if (v > best) {
            best = v;
            idx[static_cast<std::size_t>(d)] = p;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    StartResult result;
    result.angles.reserve(12);
    for (int d = 0; d < 6; ++d) {
      result.angles.push_back(grid.angles[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])][0]);
      result.angles.push_back(grid.angles[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])][1]);
    }
    auto objective = [&](const std::vector<double>& a) {
      const MerminSettings s{dir_from_angles(a[0], a[1]),  dir_from_angles(a[2], a[3]),
                             dir_from_angles(a[4], a[5]),  dir_from_angles(a[6], a[7]),
                             dir_from_angles(a[8], a[9]),  dir_from_angles(a[10], a[11])};
      return mermin_temporal(E3, s);
    };
    result.value = refine_angles(result.angles, objective);
    return result;
  };

  std::vector<StartResult> results(kStarts);
  detail::run_blocks<int>(kStarts, threads, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t s = begin; s < end; ++s) results[s] = run_start(static_cast<int>(s));
    return 0;
  });
  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s) {
    if (results[s].value > results[best].value) best = s;
  }

  const auto& a = results[best].angles;
  InequalityReport report;
  report.name = "mermin";
  report.lhs = results[best].value;
  report.bound = 2.0;
  report.violated = report.lhs > report.bound + kViolationTolerance;
  report.witness = {{"a1", dir_json(dir_from_angles(a[0], a[1]))},
                    {"a2", dir_json(dir_from_angles(a[2], a[3]))},
                    {"b1", dir_json(dir_from_angles(a[4], a[5]))},
                    {"b2", dir_json(dir_from_angles(a[6], a[7]))},
                    {"c1", dir_json(dir_from_angles(a[8], a[9]))},
                    {"c2", dir_json(dir_from_angles(a[10], a[11]))}};
  return report;
}

double dot_correlator(const MeasurementDirection& a, const MeasurementDirection& b) {
  return a.dot(b);
}

Correlator2 factorized_correlator(const BlochState& s) {
  return [s](const MeasurementDirection& a, const MeasurementDirection& b) {
    return s.dot(a) * s.dot(b);
  };
}

Correlator3 markov_correlator(const BlochState& s) {
  return [s](const MeasurementDirection& a, const MeasurementDirection& b,
             const MeasurementDirection& c) { return quantum::correlator(s, {a, b, c}); };
}

Correlator3 markov_correlator_closed_form(const BlochState& s) {
  return [s](const MeasurementDirection& a, const MeasurementDirection& b,
             const MeasurementDirection& c) { return s.dot(a) * b.dot(c); };
}

SignChoice::SignChoice(std::vector<std::array<int, 2>> c) : c_(std::move(c)) {
  if (c_.empty()) throw std::invalid_argument("SignChoice: no sign tables");
  for (const auto& ck : c_) {
    if ((ck[0] != 1 && ck[0] != -1) || (ck[1] != 1 && ck[1] != -1)) {
      throw std::invalid_argument("SignChoice: values must be +1 or -1");
    }
  }
}

SignChoice SignChoice::all_plus(int n) {
  if (n < 1) throw std::invalid_argument("SignChoice::all_plus: n must be >= 1");
  return SignChoice(std::vector<std::array<int, 2>>(static_cast<std::size_t>(n), {1, 1}));
}

SignChoice SignChoice::from_encoding(int n, std::uint64_t encoding) {
  if (n < 1 || n > 31) throw std::invalid_argument("SignChoice::from_encoding: n out of range");
  if (encoding >= (1ull << (2 * n))) {
    throw std::invalid_argument("SignChoice::from_encoding: encoding out of range");
  }
  std::vector<std::array<int, 2>> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    c[static_cast<std::size_t>(k)] = {((encoding >> (2 * k)) & 1) ? -1 : 1,
                                      ((encoding >> (2 * k + 1)) & 1) ? -1 : 1};
  }
  return SignChoice(std::move(c));
}

std::uint64_t SignChoice::encoding() const {
  std::uint64_t e = 0;
  for (int k = 0; k < length(); ++k) {
    const auto& ck = c_[static_cast<std::size_t>(k)];
    if (ck[0] == -1) e |= 1ull << (2 * k);
    if (ck[1] == -1) e |= 1ull << (2 * k + 1);
  }
  return e;
}

int SignChoice::sign(std::size_t k, int xbit) const {
  if (k >= c_.size()) throw std::invalid_argument("SignChoice::sign: step index out of range");
  if (xbit != 0 && xbit != 1) throw std::invalid_argument("SignChoice::sign: xbit must be a bit");
  return c_[k][static_cast<std::size_t>(xbit)];
}

std::int64_t general_lhs(const AnswerFn& answer, const SignChoice& signs, int n, int threads) {
  if (n < 1 || n % 2 == 0) throw std::invalid_argument("general_lhs: n must be a positive odd integer");
  if (n > kMaxExactFidelityN) {
    throw CapacityError("general_lhs: exact enumeration supports n <= " +
                        std::to_string(kMaxExactFidelityN));
  }
  if (signs.length() != n) throw std::invalid_argument("general_lhs: sign choice length mismatch");
  const std::uint64_t num_x = 1ull << (n - 1);
  const std::uint64_t num_y = 1ull << n;
  auto partial = [&](std::uint64_t begin, std::uint64_t end) -> std::int64_t {
    InputSequence seq = InputSequence::from_bits(n, 0, 0);
    std::int64_t sum = 0;
    for (std::uint64_t free = begin; free < end; ++free) {
      const std::uint64_t xbits =
          free | ((static_cast<std::uint64_t>(std::popcount(free)) & 1ull) << (n - 1));
      int coeff = kCosQuarter[std::popcount(xbits) & 3];
      for (int k = 0; k < n; ++k) {
        coeff *= signs.sign(static_cast<std::size_t>(k), static_cast<int>((xbits >> k) & 1));
      }
      for (std::uint64_t ybits = 0; ybits < num_y; ++ybits) {
        for (int k = 0; k < n; ++k) {
          seq.set(static_cast<std::size_t>(k),
                  {static_cast<std::uint8_t>((xbits >> k) & 1),
                   static_cast<std::uint8_t>((ybits >> k) & 1)});
        }
        const int term = (std::popcount(ybits) & 1) ? -coeff : coeff;
        sum += term * answer(seq);
      }
    }
    return sum;
  };
  std::int64_t total = 0;
  for (std::int64_t part : detail::run_blocks<std::int64_t>(num_x, threads, partial)) total += part;
  return total;
}

std::int64_t general_lhs_bound(int n) {
  if (n < 1 || n % 2 == 0) {
    throw std::invalid_argument("general_lhs_bound: n must be a positive odd integer");
  }
  if (n > 40) throw CapacityError("general_lhs_bound: n too large for exact representation");
  return std::int64_t{1} << ((n - 1) / 2 + n);
}

GeneralLhsMax max_general_lhs(int n, int threads) {
  if (n < 1 || n % 2 == 0) {
    throw std::invalid_argument("max_general_lhs: n must be a positive odd integer");
  }
  if (n > 3) {
    throw CapacityError("max_general_lhs: exhaustive strategy scan supports odd n <= 3");
  }
  const auto start = std::chrono::steady_clock::now();
  const classical::detail::SequenceTables tables(n);

  // Per-sign-choice products prod_k c_k(x_k) on each even x-string.
  const std::uint32_t num_signs = 1u << (2 * n);
  std::vector<std::int32_t> sigma(static_cast<std::size_t>(num_signs) * tables.num_x);
  for (std::uint32_t se = 0; se < num_signs; ++se) {
    for (std::uint32_t free = 0; free < tables.num_x; ++free) {
      const std::uint32_t xbits = free | ((static_cast<std::uint32_t>(std::popcount(free)) & 1u)
                                          << (n - 1));
      int prod = 1;
      for (int k = 0; k < n; ++k) {
        const int bit = static_cast<int>((se >> (2 * k + ((xbits >> k) & 1))) & 1);
        prod *= bit ? -1 : 1;
      }
      sigma[static_cast<std::size_t>(se) * tables.num_x + free] = prod;
    }
  }

  // Bit-parallel boards (n <= 3 fits one word).
  const std::uint64_t used = tables.used_mask[0];
  const std::uint64_t yprod = tables.yprod_mask[0];
  std::uint64_t cm[4][4] = {};
  for (int k = 0; k < n; ++k) {
    for (int code = 0; code < 4; ++code) {
      cm[k][code] = tables.code_mask[static_cast<std::size_t>(k)][static_cast<std::size_t>(code)][0];
    }
  }
  std::vector<std::uint64_t> xmask(tables.num_x);
  for (std::uint32_t f = 0; f < tables.num_x; ++f) xmask[f] = tables.xstring_mask[f][0];
  const int num_y = 1 << n;

  struct Best {
    std::int64_t value = 0;
    std::uint64_t enc = 0;
    std::uint32_t signs = 0;
    bool has = false;
    void offer(std::int64_t v, std::uint64_t e, std::uint32_t s) {
      if (!has || v > value || (v == value && (e < enc || (e == enc && s < signs)))) {
        value = v;
        enc = e;
        signs = s;
        has = true;
      }
    }
  };

  auto apply = [&](int k, unsigned t, std::uint64_t s) {
    std::uint64_t out = 0;
    for (int code = 0; code < 4; ++code) {
      const std::uint64_t m0 = -static_cast<std::uint64_t>((t >> (2 * code)) & 1u);
      const std::uint64_t m1 = -static_cast<std::uint64_t>((t >> (2 * code + 1)) & 1u);
      out |= cm[k][code] & ((m0 & ~s) | (m1 & s));
    }
    return out;
  };

  auto score_leaf = [&](std::uint64_t state, std::uint64_t enc, Best& best) {
    std::int32_t d[4] = {0, 0, 0, 0};
    for (std::uint32_t f = 0; f < tables.num_x; ++f) {
      const int s_a = num_y - 2 * std::popcount((state ^ yprod) & xmask[f]);
      d[f] = tables.f_of_x[f] * s_a;
    }
    for (std::uint32_t se = 0; se < num_signs; ++se) {
      const std::int32_t* row = sigma.data() + static_cast<std::size_t>(se) * tables.num_x;
      std::int64_t v = 0;
      for (std::uint32_t f = 0; f < tables.num_x; ++f) v += row[f] * d[f];
      best.offer(v, enc, se);
    }
  };

  std::vector<Best> chunk_best(512);
  std::atomic<unsigned> next{0};
  auto worker = [&] {
    for (;;) {
      const unsigned chunk = next.fetch_add(1);
      if (chunk >= 512) return;
      const unsigned a0bit = chunk >> 8;
      const unsigned t0 = chunk & 255u;
      std::uint64_t s0 = a0bit ? used : 0ull;
      s0 = apply(0, t0, s0);
      const std::uint64_t e0 = (static_cast<std::uint64_t>(a0bit) << (8 * n)) | t0;
      Best best;
      if (n == 1) {
        score_leaf(s0, e0, best);
      } else {
        for (unsigned t1 = 0; t1 < 256; ++t1) {
          const std::uint64_t s1 = apply(1, t1, s0);
          const std::uint64_t e1 = e0 | (static_cast<std::uint64_t>(t1) << 8);
          if (n == 2) {
            score_leaf(s1, e1, best);
          } else {
            for (unsigned t2 = 0; t2 < 256; ++t2) {
              score_leaf(apply(2, t2, s1), e1 | (static_cast<std::uint64_t>(t2) << 16), best);
            }
          }
        }
      }
      chunk_best[chunk] = best;
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Best best;
  for (const Best& b : chunk_best) {
    if (b.has) best.offer(b.value, b.enc, b.signs);
  }

  GeneralLhsMax result;
  result.n = n;
  result.max_value = best.value;
  result.answer_encoding = best.enc;
  result.signs_encoding = best.signs;
  result.strategies_scanned = 2ull << (8 * n);
  result.sign_choices = num_signs;
  result.elapsed_ms = ms_since(start);
  return result;
}

Dyadic violation_ratio(int n) {
  if (n < 1) throw std::invalid_argument("violation_ratio: n must be >= 1");
  if (n > 120) throw CapacityError("violation_ratio: n too large for exact representation");
  return Dyadic(std::int64_t{1} << ((n + 1) / 2 - 1), 0);
}

}  // namespace temporal_bell::inequalities
