#include "temporal_bell/quantum.hpp"

#include <bit>
#include <cmath>

#include "temporal_bell/errors.hpp"

namespace temporal_bell::quantum {

namespace {

constexpr double kUnitTolerance = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double norm3(const std::array<double, 3>& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

// i^code
constexpr complexd kQuarterPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

}  // namespace

MeasurementDirection::MeasurementDirection(std::array<double, 3> v) : v_(v) {
  if (std::abs(norm3(v_) - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("MeasurementDirection: vector must be unit length");
  }
}

BlochState::BlochState(std::array<double, 3> s) : s_(s) {
  if (norm3(s_) > 1.0 + kUnitTolerance) {
    throw std::invalid_argument("BlochState: |s| must be <= 1");
  }
}

double BlochState::norm() const { return norm3(s_); }

PhaseGate PhaseGate::adjoint() const { return PhaseGate(std::conj(d0_), std::conj(d1_)); }

PhaseGate phase_gate(int code) {
  if (code < 0 || code > 3) throw std::invalid_argument("phase_gate: code must be in {0,1,2,3}");
  return PhaseGate(complexd{1, 0}, kQuarterPhase[code]);
}

ProtocolRun run_protocol_detailed(const InputSequence& seq) {
  ProtocolRun run;
  int total = 0;
  QubitState psi{complexd{kInvSqrt2, 0}, complexd{kInvSqrt2, 0}};
  for (const InputSymbol& sym : seq) {
    total += sym.code();
    psi = phase_gate(sym.code()).apply(psi);
  }
  run.total_code_mod4 = total & 3;
  run.final_state = psi;
  const complexd plus_amp = (psi.amp0 + psi.amp1) * kInvSqrt2;
  run.p_plus = std::norm(plus_amp);
  if ((run.total_code_mod4 & 1) == 0) {
    run.deterministic = true;
    run.outcome = run.total_code_mod4 == 0 ? 1 : -1;
  }
  return run;
}

int run_protocol(const InputSequence& seq) {
  if (seq.parity() != 0) {
    throw NondeterministicOutcomeError(
        "run_protocol: odd-parity input is outside the promise; outcome is not deterministic");
  }
  const ProtocolRun run = run_protocol_detailed(seq);
  // The amplitude path must agree with the integer phase total.
  const double expected = run.outcome == 1 ? 1.0 : 0.0;
  if (std::abs(run.p_plus - expected) > kUnitTolerance) {
    throw std::logic_error("run_protocol: amplitude path disagrees with phase accumulator");
  }
  return run.outcome;
}

int sample_protocol(const InputSequence& seq, const CounterRng& rng, std::uint64_t draw_index) {
  const ProtocolRun run = run_protocol_detailed(seq);
  return rng.unit(draw_index) < run.p_plus ? 1 : -1;
}

Dyadic quantum_fidelity_exact(int n, int threads) {
  return fidelity_average([](const InputSequence& seq) { return run_protocol(seq); }, n, threads);
}

double quantum_fidelity(int n, int threads) { return quantum_fidelity_exact(n, threads).to_double(); }

OutcomeDistribution::OutcomeDistribution(BlochState initial, std::vector<MeasurementDirection> dirs,
                                         std::vector<double> probs)
    : initial_(initial), dirs_(std::move(dirs)), probs_(std::move(probs)) {}

std::vector<int> OutcomeDistribution::outcome(std::size_t index) const {
  const std::size_t m = dirs_.size();
  std::vector<int> v(m);
  for (std::size_t j = 0; j < m; ++j) {
    v[j] = ((index >> (m - 1 - j)) & 1) ? -1 : 1;
  }
  return v;
}

double OutcomeDistribution::correlator() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const int sign = (std::popcount(i) & 1) ? -1 : 1;
    sum += sign * probs_[i];
  }
  return sum;
}

nlohmann::ordered_json OutcomeDistribution::to_json() const {
  nlohmann::ordered_json dirs = nlohmann::ordered_json::array();
  for (const auto& d : dirs_) dirs.push_back({d[0], d[1], d[2]});
  nlohmann::ordered_json outcomes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    outcomes.push_back({{"v", outcome(i)}, {"p", probs_[i]}});
  }
  return {{"dirs", std::move(dirs)},
          {"s", {initial_[0], initial_[1], initial_[2]}},
          {"outcomes", std::move(outcomes)}};
}

OutcomeDistribution sequential_distribution(const BlochState& initial,
                                            const std::vector<MeasurementDirection>& dirs) {
  if (dirs.empty() || dirs.size() > kMaxSequentialMeasurements) {
    throw std::invalid_argument("sequential_distribution: need between 1 and 8 directions");
  }
  const std::size_t m = dirs.size();
  std::vector<double> probs(std::size_t{1} << m);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    double p = 1.0;
    std::array<double, 3> prev = initial.vec();
    for (std::size_t j = 0; j < m; ++j) {
      const int v = ((i >> (m - 1 - j)) & 1) ? -1 : 1;
      const auto& d = dirs[j];
      const double overlap = d[0] * prev[0] + d[1] * prev[1] + d[2] * prev[2];
      p *= 0.5 * (1.0 + v * overlap);
      prev = {v * d[0], v * d[1], v * d[2]};
    }
    probs[i] = p;
  }
  return OutcomeDistribution(initial, dirs, std::move(probs));
}

double correlator(const BlochState& initial, const std::vector<MeasurementDirection>& dirs) {
  return sequential_distribution(initial, dirs).correlator();
}

double correlator_closed_form(const BlochState& initial,
                              const std::vector<MeasurementDirection>& dirs) {
  if (dirs.empty() || dirs.size() > kMaxSequentialMeasurements) {
    throw std::invalid_argument("correlator_closed_form: need between 1 and 8 directions");
  }
  double result = 1.0;
  std::size_t j = 0;
  if (dirs.size() % 2 == 1) {
    result = initial.dot(dirs[0]);
    j = 1;
  }
  for (; j + 1 < dirs.size(); j += 2) {
    result *= dirs[j].dot(dirs[j + 1]);
  }
  return result;
}

std::vector<int> sample_sequential(const BlochState& initial,
                                   const std::vector<MeasurementDirection>& dirs,
                                   const CounterRng& rng, std::uint64_t draw_index) {
  if (dirs.empty() || dirs.size() > kMaxSequentialMeasurements) {
    throw std::invalid_argument("sample_sequential: need between 1 and 8 directions");
  }
  std::vector<int> outcome(dirs.size());
  std::array<double, 3> prev = initial.vec();
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const auto& d = dirs[j];
    const double overlap = d[0] * prev[0] + d[1] * prev[1] + d[2] * prev[2];
    const double p_plus = 0.5 * (1.0 + overlap);
    const int v = rng.unit(draw_index * kMaxSequentialMeasurements + j) < p_plus ? 1 : -1;
    outcome[j] = v;
    prev = {v * d[0], v * d[1], v * d[2]};
  }
  return outcome;
}

}  // namespace temporal_bell::quantum
