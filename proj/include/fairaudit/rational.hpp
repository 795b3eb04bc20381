#pragma once

#include <charconv>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fairaudit {

/// Exact rational number on int64 numerator/denominator.
///
/// Scenario parameters (prevalences, sensitivities, disparity ratios) and
/// expected-value outcomes are kept exact; conversion to double happens only
/// at the display or sampling boundary. All arithmetic is overflow-checked
/// through 128-bit intermediates and throws std::overflow_error when a result
/// does not fit int64.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT: implicit by design
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

  /// Parses "p/q", plain integers, and decimal/scientific literals
  /// ("0.98", "1e-3", "9e-05"). The decimal form is converted exactly.
  static Rational parse(std::string_view text);

  /// Recovers the decimal a double was written as, via the shortest
  /// round-trip representation. Exact for human-entered decimals.
  static Rational from_double(double value);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Canonical text form: exact decimal when the denominator divides a power
  /// of ten ("0.6125"), otherwise "p/q".
  std::string to_string() const;

  std::int64_t round_half_away_from_zero() const;

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make_checked(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make_checked(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make_checked(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make_checked(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

 private:
  using i128 = __int128;

  void normalize();
  static Rational make_checked(i128 num, i128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace fairaudit
