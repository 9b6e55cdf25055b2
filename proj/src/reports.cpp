#include "temporal_bell/reports.hpp"

#include "temporal_bell/format.hpp"

namespace temporal_bell::reports {

std::string to_string(SearchMode mode) {
  return mode == SearchMode::reduced ? "reduced" : "brute_force";
}

nlohmann::ordered_json GameReport::to_json() const {
  return {{"schema", "1"},
          {"n", n},
          {"classical_max", classical_max.to_string()},
          {"classical_max_float", classical_max.to_double()},
          {"classical_bound", classical_bound.to_string()},
          {"classical_bound_float", classical_bound.to_double()},
          {"quantum_fidelity", quantum_fidelity},
          {"violation_ratio", violation_ratio.to_string()},
          {"violation_ratio_float", violation_ratio.to_double()},
          {"search_mode", to_string(search_mode)},
          {"elapsed_ms", elapsed_ms}};
}

std::string GameReport::csv_header() {
  return "n,classical_max,classical_bound,quantum_fidelity,violation_ratio,search_mode,elapsed_ms";
}

std::string GameReport::csv_row() const {
  return std::to_string(n) + "," + classical_max.to_string() + "," + classical_bound.to_string() +
         "," + format_double(quantum_fidelity) + "," + violation_ratio.to_string() + "," +
         to_string(search_mode) + "," + std::to_string(elapsed_ms);
}

}  // namespace temporal_bell::reports
