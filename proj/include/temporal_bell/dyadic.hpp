#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace temporal_bell {

/// Exact dyadic rational num / 2^log2_den.
///
/// Kept normalized: num is odd or zero, and log2_den >= 0. All fidelities,
/// weights and bounds in this library are dyadic, so this type is enough for
/// exact arithmetic end to end. Magnitudes stay far below the int64 range for
/// every supported game size.
class Dyadic {
 public:
  constexpr Dyadic() = default;
  constexpr Dyadic(std::int64_t num, int log2_den = 0) : num_(num), log2_den_(log2_den) {
    if (log2_den < 0 || log2_den > 62) {
      throw std::invalid_argument("Dyadic: log2_den out of range");
    }
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr int log2_den() const { return log2_den_; }

  double to_double() const { return std::ldexp(static_cast<double>(num_), -log2_den_); }

  /// Renders as "p/2^q", e.g. "1/2^1" for one half, "-3/2^2" for -3/4.
  std::string to_string() const {
    return std::to_string(num_) + "/2^" + std::to_string(log2_den_);
  }

  constexpr Dyadic operator-() const { return raw(-num_, log2_den_); }

  friend constexpr Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    const int q = a.log2_den_ > b.log2_den_ ? a.log2_den_ : b.log2_den_;
    return Dyadic((a.num_ << (q - a.log2_den_)) + (b.num_ << (q - b.log2_den_)), q);
  }
  friend constexpr Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend constexpr Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.num_ * b.num_, a.log2_den_ + b.log2_den_);
  }

  friend constexpr bool operator==(const Dyadic& a, const Dyadic& b) = default;
  friend constexpr std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    const int q = a.log2_den_ > b.log2_den_ ? a.log2_den_ : b.log2_den_;
    return (a.num_ << (q - a.log2_den_)) <=> (b.num_ << (q - b.log2_den_));
  }

  constexpr Dyadic abs() const { return raw(num_ < 0 ? -num_ : num_, log2_den_); }

 private:
  static constexpr Dyadic raw(std::int64_t n, int q) {
    Dyadic d;
    d.num_ = n;
    d.log2_den_ = q;
    return d;
  }
  constexpr void normalize() {
    if (num_ == 0) {
      log2_den_ = 0;
      return;
    }
    while ((num_ & 1) == 0 && log2_den_ > 0) {
      num_ >>= 1;
      --log2_den_;
    }
  }

  std::int64_t num_ = 0;
  int log2_den_ = 0;
};

}  // namespace temporal_bell
