#pragma once

#include <stdexcept>

namespace temporal_bell {

/// A request exceeds the exact-computation range of an operation.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The phase protocol was driven outside the even-parity promise, where the
/// final measurement outcome is not deterministic.
class NondeterministicOutcomeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace temporal_bell
