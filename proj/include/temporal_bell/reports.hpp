#pragma once

#include <cstdint>
#include <string>

#include "temporal_bell/dyadic.hpp"

#include "json.hpp"

namespace temporal_bell::reports {

enum class SearchMode { reduced, brute_force };

std::string to_string(SearchMode mode);

/// One row of a game sweep. Rational fields serialize as exact "p/2^q"
/// strings with a float convenience twin; schema is versioned.
struct GameReport {
  int n = 0;
  Dyadic classical_max;
  Dyadic classical_bound;
  double quantum_fidelity = 0.0;
  Dyadic violation_ratio;
  SearchMode search_mode = SearchMode::reduced;
  std::int64_t elapsed_ms = 0;

  nlohmann::ordered_json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

enum class OutputFormat { json, csv };

struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  OutputFormat format = OutputFormat::json;
  std::uint64_t mc_samples = 0;
  bool timings = true;  // false zeroes elapsed_ms for byte-stable output
};

}  // namespace temporal_bell::reports
