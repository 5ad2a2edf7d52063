#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace numforge {

using BigInt = boost::multiprecision::cpp_int;

/// Exact base-10 number: unscaled * 10^-scale.
///
/// Scale is part of the representation ("3.50" keeps scale 2) but not of the
/// value: comparisons are by value, so 3.50 == 3.5.
class Decimal {
 public:
  Decimal() = default;
  Decimal(BigInt unscaled, std::uint32_t scale) : unscaled_(std::move(unscaled)), scale_(scale) {}

  static Decimal from_integer(const BigInt& v) { return Decimal(v, 0); }

  /// Parses `[+-]?digits(.digits)?`. Throws InputError on anything else.
  static Decimal parse(std::string_view text);

  /// Shortest round-trip representation of a double, so 0.3 parses as "0.3".
  static Decimal from_double(double v);

  const BigInt& unscaled() const noexcept { return unscaled_; }
  std::uint32_t scale() const noexcept { return scale_; }
  bool is_negative() const { return unscaled_ < 0; }
  bool is_zero() const { return unscaled_ == 0; }

  /// True when the value is integral (regardless of scale).
  bool is_integral() const;

  /// Largest integer <= value.
  BigInt floor() const;
  /// Smallest integer >= value.
  BigInt ceil() const;

  Decimal abs() const;

  /// Same value at a larger scale. Throws std::invalid_argument when new_scale < scale().
  Decimal rescaled(std::uint32_t new_scale) const;

  /// Plain fixed-point rendering with exactly scale() fractional digits.
  std::string to_string() const;

  double to_double() const;

  friend Decimal operator*(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b);
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  BigInt unscaled_ = 0;
  std::uint32_t scale_ = 0;
};

BigInt pow10(std::uint32_t exponent);

/// ceil(ratio * count) computed exactly; used for every "select a ratio of" rule.
std::size_t ceil_fraction(const Decimal& ratio, std::size_t count);

}  // namespace numforge
