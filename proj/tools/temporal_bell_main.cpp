// Command-line front end: game sweeps, reduction verification, protocol
// simulation and correlator checks, with machine-readable JSON/CSV reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "temporal_bell/classical.hpp"
#include "temporal_bell/core.hpp"
#include "temporal_bell/format.hpp"
#include "temporal_bell/inequalities.hpp"
#include "temporal_bell/quantum.hpp"
#include "temporal_bell/reports.hpp"

namespace {

namespace tb = temporal_bell;
using tb::reports::GameReport;
using tb::reports::OutputFormat;
using tb::reports::RunConfig;
using tb::reports::SearchMode;

constexpr int kExitOk = 0;
constexpr int kExitAssertionFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

struct OutputSink {
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::int64_t elapsed_or_zero(const RunConfig& cfg, std::chrono::steady_clock::time_point start) {
  if (!cfg.timings) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               start)
      .count();
}

std::array<double, 3> parse_triple(const std::string& text) {
  std::array<double, 3> v{};
  std::stringstream ss(text);
  std::string part;
  int i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 3) throw std::invalid_argument("expected three comma-separated components: " + text);
    std::size_t pos = 0;
    v[static_cast<std::size_t>(i)] = std::stod(part, &pos);
    if (pos != part.size()) throw std::invalid_argument("bad number '" + part + "' in: " + text);
    ++i;
  }
  if (i != 3) throw std::invalid_argument("expected three comma-separated components: " + text);
  return v;
}

std::vector<std::array<double, 3>> parse_triples(const std::string& text) {
  std::vector<std::array<double, 3>> out;
  std::stringstream ss(text);
  std::string group;
  while (std::getline(ss, group, ';')) {
    if (!group.empty()) out.push_back(parse_triple(group));
  }
  if (out.empty()) throw std::invalid_argument("no direction vectors in: " + text);
  return out;
}

int cmd_bound_sweep(int n_min, int n_max, const RunConfig& cfg, std::ostream& os) {
  if (n_min < 1 || n_max < n_min) {
    throw std::invalid_argument("bound-sweep: need 1 <= n-min <= n-max");
  }
  bool any_capacity = false;
  if (cfg.format == OutputFormat::csv) os << GameReport::csv_header() << "\n";
  for (int n = n_min; n <= n_max; ++n) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto search = tb::classical::reduced_search(n, cfg.threads);
      GameReport report;
      report.n = n;
      report.classical_max = search.max_fidelity;
      report.classical_bound = tb::classical::classical_bound(n);
      report.quantum_fidelity = tb::quantum::quantum_fidelity(n, cfg.threads);
      report.violation_ratio = tb::inequalities::violation_ratio(n);
      report.search_mode = SearchMode::reduced;
      report.elapsed_ms = elapsed_or_zero(cfg, start);
      if (cfg.format == OutputFormat::csv) {
        os << report.csv_row() << "\n";
      } else {
        os << report.to_json().dump() << "\n";
      }
    } catch (const tb::CapacityError& e) {
      any_capacity = true;
      if (cfg.format == OutputFormat::csv) {
        std::cerr << "capacity error at n=" << n << ": " << e.what() << "\n";
      } else {
        nlohmann::ordered_json entry{
            {"schema", "1"}, {"n", n}, {"error", "capacity"}, {"message", e.what()}};
        os << entry.dump() << "\n";
      }
    }
  }
  return any_capacity ? kExitCapacity : kExitOk;
}

int cmd_verify(int n, bool allow_long, const std::string& checkpoint_path, const RunConfig& cfg,
               std::ostream& os) {
  const auto start = std::chrono::steady_clock::now();

  tb::classical::BruteForceOptions options;
  options.allow_long = allow_long;
  options.threads = cfg.threads;
  tb::classical::BruteForceCheckpoint resume;
  if (!checkpoint_path.empty()) {
    std::ifstream in(checkpoint_path);
    if (in) {
      resume = tb::classical::BruteForceCheckpoint::from_json(nlohmann::json::parse(in));
      options.resume = &resume;
    }
    auto last_write = std::chrono::steady_clock::now() - std::chrono::hours(1);
    options.on_chunk = [&last_write, &checkpoint_path](const tb::classical::BruteForceCheckpoint& ck) {
      const auto now = std::chrono::steady_clock::now();
      if (now - last_write < std::chrono::seconds(2)) return;
      last_write = now;
      const std::string tmp = checkpoint_path + ".tmp";
      std::ofstream out(tmp, std::ios::out | std::ios::trunc);
      out << ck.to_json().dump() << "\n";
      out.close();
      std::rename(tmp.c_str(), checkpoint_path.c_str());
    };
  }

  const auto brute = tb::classical::brute_force_search(n, options);
  const auto reduced = tb::classical::reduced_search(n, cfg.threads);
  const auto bound = tb::classical::classical_bound(n);
  const bool brute_equals_reduced = brute.max_fidelity == reduced.max_fidelity;
  const bool equals_bound = reduced.max_fidelity == bound;
  const bool pass = brute_equals_reduced && equals_bound;

  GameReport report;
  report.n = n;
  report.classical_max = brute.max_fidelity;
  report.classical_bound = bound;
  report.quantum_fidelity = tb::quantum::quantum_fidelity(n, cfg.threads);
  report.violation_ratio = tb::inequalities::violation_ratio(n);
  report.search_mode = SearchMode::brute_force;
  report.elapsed_ms = elapsed_or_zero(cfg, start);
  if (cfg.format == OutputFormat::csv) {
    os << GameReport::csv_header() << "\n" << report.csv_row() << "\n";
    if (!pass) std::cerr << "verify failed: maxima do not match the bound\n";
  } else {
    auto j = report.to_json();
    j["checks"] = {{"brute_equals_reduced", brute_equals_reduced}, {"equals_bound", equals_bound}};
    j["pass"] = pass;
    os << j.dump() << "\n";
  }
  return pass ? kExitOk : kExitAssertionFailed;
}

int cmd_protocol(int n, std::uint64_t samples, const RunConfig& cfg, std::ostream& os) {
  const auto start = std::chrono::steady_clock::now();
  const auto search = tb::classical::reduced_search(n, cfg.threads);
  const auto best =
      tb::classical::ReducedStrategy::from_encoding(n, search.argmax_encoding);
  const tb::Dyadic quantum_exact = tb::quantum::quantum_fidelity_exact(n, cfg.threads);

  std::optional<double> quantum_mc;
  std::optional<double> classical_mc;
  if (samples > 0) {
    const tb::CounterRng rng(cfg.seed);
    quantum_mc = tb::fidelity_monte_carlo(
        [](const tb::InputSequence& seq) { return tb::quantum::run_protocol(seq); }, n, samples,
        rng, cfg.threads);
    classical_mc = tb::fidelity_monte_carlo(
        [&best](const tb::InputSequence& seq) { return best.answer(seq); }, n, samples, rng,
        cfg.threads);
  }

  const std::int64_t elapsed = elapsed_or_zero(cfg, start);
  if (cfg.format == OutputFormat::csv) {
    os << "n,samples,quantum_fidelity_exact,quantum_fidelity_mc,classical_max,"
          "classical_fidelity_mc,elapsed_ms\n";
    os << n << "," << samples << "," << tb::format_double(quantum_exact.to_double()) << ","
       << (quantum_mc ? tb::format_double(*quantum_mc) : "") << ","
       << search.max_fidelity.to_string() << ","
       << (classical_mc ? tb::format_double(*classical_mc) : "") << "," << elapsed << "\n";
  } else {
    nlohmann::ordered_json j{
        {"schema", "1"},
        {"n", n},
        {"samples", samples},
        {"seed", cfg.seed},
        {"quantum_fidelity_exact", quantum_exact.to_double()},
        {"quantum_fidelity_mc", quantum_mc ? nlohmann::ordered_json(*quantum_mc)
                                           : nlohmann::ordered_json(nullptr)},
        {"classical_max", search.max_fidelity.to_string()},
        {"classical_max_float", search.max_fidelity.to_double()},
        {"classical_fidelity_mc", classical_mc ? nlohmann::ordered_json(*classical_mc)
                                               : nlohmann::ordered_json(nullptr)},
        {"classical_bound", tb::classical::classical_bound(n).to_string()},
        {"elapsed_ms", elapsed}};
    os << j.dump() << "\n";
  }
  return kExitOk;
}

int cmd_correlators(const std::string& s_text, const std::string& dirs_text, const RunConfig& cfg,
                    std::ostream& os) {
  const auto s_vec = parse_triple(s_text);
  const tb::quantum::BlochState s(s_vec);
  std::vector<tb::quantum::MeasurementDirection> dirs;
  for (const auto& d : parse_triples(dirs_text)) dirs.emplace_back(d);

  const double exact = tb::quantum::correlator(s, dirs);
  const double analytic = tb::quantum::correlator_closed_form(s, dirs);
  const double diff = std::abs(exact - analytic);

  if (cfg.format == OutputFormat::csv) {
    os << "exact,analytic,abs_diff\n"
       << tb::format_double(exact) << "," << tb::format_double(analytic) << ","
       << tb::format_double(diff) << "\n";
  } else {
    nlohmann::ordered_json dirs_json = nlohmann::ordered_json::array();
    for (const auto& d : dirs) dirs_json.push_back({d[0], d[1], d[2]});
    nlohmann::ordered_json j{{"schema", "1"},
                             {"s", {s[0], s[1], s[2]}},
                             {"dirs", std::move(dirs_json)},
                             {"exact", exact},
                             {"analytic", analytic},
                             {"abs_diff", diff}};
    os << j.dump() << "\n";
  }
  return kExitOk;
}

int cmd_chsh(const RunConfig& cfg, std::ostream& os) {
  auto chsh = tb::inequalities::maximize_chsh(tb::inequalities::dot_correlator, cfg.threads);
  const tb::quantum::BlochState s(0.0, 0.0, 1.0);
  auto mermin = tb::inequalities::maximize_mermin(tb::inequalities::markov_correlator(s),
                                                  cfg.threads);
  mermin.witness["s"] = {s[0], s[1], s[2]};

  if (cfg.format == OutputFormat::csv) {
    os << "name,lhs,bound,violated\n";
    os << "chsh," << tb::format_double(chsh.lhs) << "," << tb::format_double(chsh.bound) << ","
       << (chsh.violated ? "true" : "false") << "\n";
    os << "mermin," << tb::format_double(mermin.lhs) << "," << tb::format_double(mermin.bound)
       << "," << (mermin.violated ? "true" : "false") << "\n";
  } else {
    os << chsh.to_json().dump() << "\n";
    os << mermin.to_json().dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal Bell inequality simulator: classical strategy searches, the qubit "
               "phase protocol, sequential correlators, and inequality maximization."};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string format = "json";
  std::string out_path;
  bool no_timings = false;
  cfg.threads = static_cast<int>(std::thread::hardware_concurrency());
  if (cfg.threads < 1) cfg.threads = 1;
  app.add_option("--seed", cfg.seed, "RNG seed (counter-based SplitMix64 stream)");
  app.add_option("--threads", cfg.threads, "Worker thread count")
      ->envname("TEMPORAL_BELL_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", out_path, "Write reports to a file instead of stdout");
  app.add_flag("--no-timings", no_timings,
               "Report elapsed_ms as 0 so repeated runs are byte-identical");

  auto* sweep = app.add_subcommand("bound-sweep",
                                   "Classical maximum, bound, quantum fidelity and violation "
                                   "ratio for a range of game lengths");
  int n_min = 1, n_max = 1;
  sweep->add_option("--n-min", n_min, "Smallest game length")->required();
  sweep->add_option("--n-max", n_max, "Largest game length")->required();

  auto* verify = app.add_subcommand(
      "verify", "Cross-check the full general-strategy scan against the reduced scan and bound");
  int verify_n = 1;
  bool allow_long = false;
  std::string checkpoint_path;
  verify->add_option("--n", verify_n, "Game length")->required()->check(CLI::PositiveNumber);
  verify->add_flag("--allow-long", allow_long, "Permit the long n=4 scan");
  verify->add_option("--checkpoint", checkpoint_path,
                     "Checkpoint file for the long scan (resumes if present)");

  auto* protocol = app.add_subcommand(
      "protocol", "Run the phase protocol and the best classical strategy side by side");
  int protocol_n = 1;
  protocol->add_option("--n", protocol_n, "Game length")->required()->check(CLI::PositiveNumber);
  protocol->add_option("--samples", cfg.mc_samples, "Monte-Carlo samples (0 = exact-only)");

  auto* correlators =
      app.add_subcommand("correlators", "Sequential-measurement correlator, exact vs closed form");
  std::string s_text, dirs_text;
  correlators->add_option("--s", s_text, "Initial Bloch vector, e.g. 0,0,1")->required();
  correlators->add_option("--dirs", dirs_text, "Measurement directions, e.g. \"0,0,1;1,0,0\"")
      ->required();

  auto* chsh = app.add_subcommand(
      "chsh", "Maximize the two-time expression (dot correlator) and the three-time extension "
              "(sequential-chain correlator)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
  cfg.timings = !no_timings;

  try {
    OutputSink sink(out_path);
    if (sweep->parsed()) return cmd_bound_sweep(n_min, n_max, cfg, sink.stream());
    if (verify->parsed()) {
      return cmd_verify(verify_n, allow_long, checkpoint_path, cfg, sink.stream());
    }
    if (protocol->parsed()) return cmd_protocol(protocol_n, cfg.mc_samples, cfg, sink.stream());
    if (correlators->parsed()) return cmd_correlators(s_text, dirs_text, cfg, sink.stream());
    if (chsh->parsed()) return cmd_chsh(cfg, sink.stream());
  } catch (const temporal_bell::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertionFailed;
  }
  return kExitUsage;
}
