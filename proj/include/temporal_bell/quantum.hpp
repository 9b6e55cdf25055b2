#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "temporal_bell/core.hpp"
#include "temporal_bell/dyadic.hpp"
#include "temporal_bell/rng.hpp"

#include "json.hpp"

namespace temporal_bell::quantum {

using complexd = std::complex<double>;

/// Pure qubit state amp0|0> + amp1|1>.
struct QubitState {
  complexd amp0;
  complexd amp1;

  double norm() const { return std::norm(amp0) + std::norm(amp1); }
};

/// Unit Stern-Gerlach direction. Construction rejects vectors whose norm is
/// off unit by more than 1e-12.
class MeasurementDirection {
 public:
  explicit MeasurementDirection(std::array<double, 3> v);
  MeasurementDirection(double x, double y, double z)
      : MeasurementDirection(std::array<double, 3>{x, y, z}) {}

  double operator[](std::size_t i) const { return v_[i]; }
  const std::array<double, 3>& vec() const { return v_; }

  double dot(const MeasurementDirection& o) const {
    return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2];
  }

 private:
  std::array<double, 3> v_;
};

/// Bloch vector s of a qubit density matrix (|s| <= 1 + 1e-12).
class BlochState {
 public:
  explicit BlochState(std::array<double, 3> s);
  BlochState(double x, double y, double z) : BlochState(std::array<double, 3>{x, y, z}) {}

  double operator[](std::size_t i) const { return s_[i]; }
  const std::array<double, 3>& vec() const { return s_; }
  double norm() const;

  double dot(const MeasurementDirection& d) const {
    return s_[0] * d[0] + s_[1] * d[1] + s_[2] * d[2];
  }

 private:
  std::array<double, 3> s_;
};

/// Diagonal unitary diag(1, e^{i pi X / 2}); entries come from an exact
/// {1, i, -1, -i} lookup, never from floating trig.
class PhaseGate {
 public:
  complexd d0() const { return d0_; }
  complexd d1() const { return d1_; }

  PhaseGate adjoint() const;
  QubitState apply(const QubitState& psi) const {
    return {d0_ * psi.amp0, d1_ * psi.amp1};
  }
  std::array<std::array<complexd, 2>, 2> matrix() const {
    return {{{d0_, complexd{0, 0}}, {complexd{0, 0}, d1_}}};
  }

  friend PhaseGate operator*(const PhaseGate& a, const PhaseGate& b) {
    return PhaseGate(a.d0_ * b.d0_, a.d1_ * b.d1_);
  }

 private:
  friend PhaseGate phase_gate(int code);
  PhaseGate(complexd d0, complexd d1) : d0_(d0), d1_(d1) {}
  complexd d0_;
  complexd d1_;
};

PhaseGate phase_gate(int code);

struct ProtocolRun {
  bool deterministic = false;
  int outcome = 0;           // +1/-1 when deterministic, else 0
  int total_code_mod4 = 0;   // integer phase accumulator, the primary result
  double p_plus = 0.0;       // from the complex amplitude path
  QubitState final_state{complexd{0, 0}, complexd{0, 0}};
};

/// Full protocol run: prepare (|0>+|1>)/sqrt(2), apply phase_gate(X_k) per
/// step, project onto (|0>+-|1>)/sqrt(2). The integer phase total is the
/// primary result; the amplitude path is carried alongside as a numerical
/// cross-check. Off-promise sequences are reported, not rejected.
ProtocolRun run_protocol_detailed(const InputSequence& seq);

/// Deterministic protocol outcome on promise support (equals the task value).
/// Throws NondeterministicOutcomeError for odd-parity input, where neither
/// measurement outcome has probability one.
int run_protocol(const InputSequence& seq);

/// Samples the final measurement instead of reading the deterministic
/// outcome; works off-promise too. Draw i consumes rng counter i.
int sample_protocol(const InputSequence& seq, const CounterRng& rng, std::uint64_t draw_index);

/// Exact fidelity of run_protocol as the answer function; n <= 14.
Dyadic quantum_fidelity_exact(int n, int threads = 1);
double quantum_fidelity(int n, int threads = 1);

inline constexpr std::size_t kMaxSequentialMeasurements = 8;

/// Joint outcome distribution of a projective measurement chain. Outcome
/// tuples are enumerated with the first measurement as the most significant
/// choice and +1 before -1; zero-probability branches are kept.
class OutcomeDistribution {
 public:
  OutcomeDistribution(BlochState initial, std::vector<MeasurementDirection> dirs,
                      std::vector<double> probs);

  std::size_t measurements() const { return dirs_.size(); }
  std::size_t size() const { return probs_.size(); }
  double probability(std::size_t index) const { return probs_[index]; }
  std::vector<int> outcome(std::size_t index) const;

  const BlochState& initial() const { return initial_; }
  const std::vector<MeasurementDirection>& directions() const { return dirs_; }

  double correlator() const;

  nlohmann::ordered_json to_json() const;

 private:
  BlochState initial_;
  std::vector<MeasurementDirection> dirs_;
  std::vector<double> probs_;
};

/// Chain-rule distribution: P(v | previous) = (1 + v n.prev)/2 and the
/// post-measurement Bloch vector is v n. 1 <= |dirs| <= 8.
OutcomeDistribution sequential_distribution(const BlochState& initial,
                                            const std::vector<MeasurementDirection>& dirs);

/// Sum over outcome tuples of (product of outcomes) * probability.
double correlator(const BlochState& initial, const std::vector<MeasurementDirection>& dirs);

/// Closed form of the chain correlator: directions pair up from the back,
///   even m: (n1.n2)(n3.n4)...,  odd m: (s.n1)(n2.n3)(n4.n5)...
double correlator_closed_form(const BlochState& initial,
                              const std::vector<MeasurementDirection>& dirs);

/// Ancestral sampling along the chain; measurement j of draw i reads rng
/// counter i * kMaxSequentialMeasurements + j.
std::vector<int> sample_sequential(const BlochState& initial,
                                   const std::vector<MeasurementDirection>& dirs,
                                   const CounterRng& rng, std::uint64_t draw_index);

}  // namespace temporal_bell::quantum
