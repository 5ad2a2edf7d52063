#include "numforge/decimal.hpp"

#include "numforge/error.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace numforge {

BigInt pow10(std::uint32_t exponent) {
  BigInt r = 1;
  for (std::uint32_t i = 0; i < exponent; ++i) r *= 10;
  return r;
}

Decimal Decimal::parse(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  std::uint32_t scale = 0;
  bool seen_point = false;
  bool int_digits = false;
  bool frac_digits = false;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) {
        ++scale;
        frac_digits = true;
      } else {
        int_digits = true;
      }
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      throw InputError("malformed decimal: '" + std::string(text) + "'");
    }
  }
  if (!int_digits || (seen_point && !frac_digits)) {
    throw InputError("malformed decimal: '" + std::string(text) + "'");
  }
  // cpp_int reads a leading 0 as an octal prefix.
  const std::size_t nz = digits.find_first_not_of('0');
  BigInt unscaled(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  if (negative) unscaled = -unscaled;
  return Decimal(std::move(unscaled), scale);
}

Decimal Decimal::from_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  if (ec != std::errc{}) throw InputError("cannot represent number");
  return parse(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
}

bool Decimal::is_integral() const { return unscaled_ % pow10(scale_) == 0; }

BigInt Decimal::floor() const {
  const BigInt p = pow10(scale_);
  BigInt q = unscaled_ / p;  // truncates toward zero
  if (unscaled_ < 0 && q * p != unscaled_) q -= 1;
  return q;
}

BigInt Decimal::ceil() const {
  const BigInt p = pow10(scale_);
  BigInt q = unscaled_ / p;
  if (unscaled_ > 0 && q * p != unscaled_) q += 1;
  return q;
}

Decimal Decimal::abs() const { return Decimal(unscaled_ < 0 ? BigInt(-unscaled_) : unscaled_, scale_); }

Decimal Decimal::rescaled(std::uint32_t new_scale) const {
  if (new_scale < scale_) throw std::invalid_argument("Decimal::rescaled cannot drop digits");
  return Decimal(unscaled_ * pow10(new_scale - scale_), new_scale);
}

std::string Decimal::to_string() const {
  BigInt mag = unscaled_ < 0 ? BigInt(-unscaled_) : unscaled_;
  std::string digits = mag.str();
  if (scale_ > 0) {
    if (digits.size() <= scale_) digits.insert(0, scale_ + 1 - digits.size(), '0');
    digits.insert(digits.size() - scale_, 1, '.');
  }
  if (unscaled_ < 0) digits.insert(0, 1, '-');
  return digits;
}

double Decimal::to_double() const {
  // Round trip through text keeps correct rounding for ordinary magnitudes.
  return std::stod(to_string());
}

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal(a.unscaled_ * b.unscaled_, a.scale_ + b.scale_);
}

bool operator==(const Decimal& a, const Decimal& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  const std::uint32_t s = std::max(a.scale_, b.scale_);
  const BigInt lhs = a.unscaled_ * pow10(s - a.scale_);
  const BigInt rhs = b.unscaled_ * pow10(s - b.scale_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t ceil_fraction(const Decimal& ratio, std::size_t count) {
  if (ratio.is_negative()) throw std::invalid_argument("ceil_fraction: negative ratio");
  const Decimal product = ratio * Decimal::from_integer(BigInt(count));
  return product.ceil().convert_to<std::size_t>();
}

}  // namespace numforge
