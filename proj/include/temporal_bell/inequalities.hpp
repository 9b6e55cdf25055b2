#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "temporal_bell/core.hpp"
#include "temporal_bell/dyadic.hpp"
#include "temporal_bell/quantum.hpp"

#include "json.hpp"

namespace temporal_bell::inequalities {

using Correlator2 = std::function<double(const quantum::MeasurementDirection&,
                                         const quantum::MeasurementDirection&)>;
using Correlator3 =
    std::function<double(const quantum::MeasurementDirection&, const quantum::MeasurementDirection&,
                         const quantum::MeasurementDirection&)>;

struct ChshSettings {
  quantum::MeasurementDirection a1, a2, b1, b2;
};

struct MerminSettings {
  quantum::MeasurementDirection a1, a2, b1, b2, c1, c2;
};

/// E(a1,b1) + E(a1,b2) + E(a2,b1) - E(a2,b2); two-valued-outcome models bound
/// this by 2.
double chsh_temporal(const Correlator2& E, const ChshSettings& s);

/// E3(a1,b1,c2) + E3(a1,b2,c1) + E3(a2,b1,c1) - E3(a2,b2,c2); same bound 2.
double mermin_temporal(const Correlator3& E3, const MerminSettings& s);

inline constexpr double kViolationTolerance = 1e-9;
inline constexpr double kRefineStepTolerance = 1e-8;

struct InequalityReport {
  std::string name;
  std::optional<int> n;
  double lhs = 0.0;
  double bound = 0.0;
  bool violated = false;  // lhs > bound + kViolationTolerance
  nlohmann::ordered_json witness;

  nlohmann::ordered_json to_json() const;
};

/// Deterministic maximization of the CHSH expression: an exhaustive
/// 12x24-per-sphere lattice stage (decomposed so the full lattice product is
/// covered exactly) followed by cyclic golden-section refinement of all eight
/// angles down to kRefineStepTolerance.
InequalityReport maximize_chsh(const Correlator2& E, int threads = 1);

/// Deterministic maximization of the Mermin-type expression over the six
/// directions: multi-start per-direction lattice sweeps followed by the same
/// golden-section refinement. Starts are a fixed lattice stride pattern, so
/// results are reproducible without seeds.
InequalityReport maximize_mermin(const Correlator3& E3, int threads = 1);

double dot_correlator(const quantum::MeasurementDirection& a,
                      const quantum::MeasurementDirection& b);
Correlator2 factorized_correlator(const quantum::BlochState& s);
/// Exact sequential-measurement chain correlator for the initial state s.
Correlator3 markov_correlator(const quantum::BlochState& s);
/// Closed form (s.a)(b.c) of the same chain.
Correlator3 markov_correlator_closed_form(const quantum::BlochState& s);

/// One sign function c_k per step; encoding uses two bits per step like the
/// reduced-strategy c-tables.
class SignChoice {
 public:
  explicit SignChoice(std::vector<std::array<int, 2>> c);
  static SignChoice all_plus(int n);
  static SignChoice from_encoding(int n, std::uint64_t encoding);

  std::uint64_t encoding() const;
  int length() const { return static_cast<int>(c_.size()); }
  int sign(std::size_t k, int xbit) const;

 private:
  std::vector<std::array<int, 2>> c_;
};

/// Unnormalized inequality family member for odd n:
///   sum over input sequences of prod_l y_l * f(x) * prod_k c_k(x_k) * answer(seq),
/// an exact integer (odd-parity x-strings carry f = 0 and are skipped).
/// Answers obeying the two-state classical model keep this at or below
/// general_lhs_bound(n) for every sign choice.
std::int64_t general_lhs(const AnswerFn& answer, const SignChoice& signs, int n, int threads = 1);

/// 2^((n-1)/2) * 2^n for odd n.
std::int64_t general_lhs_bound(int n);

struct GeneralLhsMax {
  int n = 0;
  std::int64_t max_value = 0;
  std::uint64_t answer_encoding = 0;  // general-strategy encoding
  std::uint64_t signs_encoding = 0;
  std::uint64_t strategies_scanned = 0;
  std::uint64_t sign_choices = 0;
  std::int64_t elapsed_ms = 0;
};

/// Exhaustive maximum of general_lhs over all 2*256^n general strategies and
/// all 2^(2n) sign choices jointly (odd n <= 3). The per-sign-choice family
/// maximum is the same number; fixing `signs` in general_lhs gives one family
/// member.
GeneralLhsMax max_general_lhs(int n, int threads = 1);

/// quantum fidelity / classical bound = 2^(ceil(n/2) - 1), exactly.
Dyadic violation_ratio(int n);

}  // namespace temporal_bell::inequalities
