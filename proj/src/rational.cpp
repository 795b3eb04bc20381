#include "fairaudit/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace fairaudit {

namespace {

constexpr __int128 kInt64Max = std::numeric_limits<std::int64_t>::max();
constexpr __int128 kInt64Min = std::numeric_limits<std::int64_t>::min();

std::int64_t narrow_checked(__int128 value) {
  if (value > kInt64Max || value < kInt64Min) throw std::overflow_error("rational overflow");
  return static_cast<std::int64_t>(value);
}

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t pow10_checked(int exponent) {
  std::int64_t result = 1;
  for (int i = 0; i < exponent; ++i) {
    if (result > std::numeric_limits<std::int64_t>::max() / 10) {
      throw std::overflow_error("rational overflow: exponent too large");
    }
    result *= 10;
  }
  return result;
}

}  // namespace

void Rational::normalize() {
  if (den_ == 0) throw std::domain_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = narrow_checked(-i128(num_));
    den_ = narrow_checked(-i128(den_));
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  num_ /= g;
  den_ /= g;
}

Rational Rational::make_checked(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = num == 0 ? den : gcd128(num, den);
  num /= g;
  den /= g;
  Rational r;
  r.num_ = narrow_checked(num);
  r.den_ = narrow_checked(den);
  return r;
}

Rational Rational::parse(std::string_view text) {
  // Strip surrounding whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    std::int64_t num = 0;
    std::int64_t den = 0;
    const auto lhs = text.substr(0, slash);
    const auto rhs = text.substr(slash + 1);
    auto r1 = std::from_chars(lhs.data(), lhs.data() + lhs.size(), num);
    auto r2 = std::from_chars(rhs.data(), rhs.data() + rhs.size(), den);
    if (r1.ec != std::errc{} || r1.ptr != lhs.data() + lhs.size() || r2.ec != std::errc{} ||
        r2.ptr != rhs.data() + rhs.size()) {
      throw std::invalid_argument("malformed rational literal: " + std::string(text));
    }
    return Rational(num, den);
  }

  // Decimal / scientific form, converted exactly from its digits.
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  i128 digits = 0;
  int frac_digits = 0;
  int exponent = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (digits > kInt64Max) throw std::overflow_error("rational literal too long: " + std::string(text));
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      auto exp_str = s.substr(i + 1);
      if (!exp_str.empty() && exp_str.front() == '+') exp_str.remove_prefix(1);
      auto r = std::from_chars(exp_str.data(), exp_str.data() + exp_str.size(), exponent);
      if (r.ec != std::errc{} || r.ptr != exp_str.data() + exp_str.size()) {
        throw std::invalid_argument("malformed rational literal: " + std::string(text));
      }
      i = s.size();
      break;
    } else {
      throw std::invalid_argument("malformed rational literal: " + std::string(text));
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed rational literal: " + std::string(text));

  const int net = exponent - frac_digits;
  i128 num = negative ? -digits : digits;
  i128 den = 1;
  if (net >= 0) {
    num *= i128(pow10_checked(net));
  } else {
    den = i128(pow10_checked(-net));
  }
  return make_checked(num, den);
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return parse(std::string_view(buffer, result.ptr));
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);

  // A denominator of the form 2^a 5^b renders as an exact decimal.
  std::int64_t rest = den_;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return std::to_string(num_) + "/" + std::to_string(den_);

  // den * multiplier == 10^k; multiplier supplies the missing 2s or 5s.
  const int k = twos > fives ? twos : fives;
  i128 multiplier = 1;
  for (int i = 0; i < k - twos; ++i) multiplier *= 2;
  for (int i = 0; i < k - fives; ++i) multiplier *= 5;
  i128 scaled = i128(num_ < 0 ? -num_ : num_) * multiplier;

  std::string digits;
  if (scaled == 0) digits = "0";
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  }
  while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
  digits.insert(digits.size() - k, ".");
  // Trim trailing zeros but keep at least one fractional digit.
  while (digits.back() == '0' && digits[digits.size() - 2] != '.') digits.pop_back();
  if (num_ < 0) digits.insert(digits.begin(), '-');
  return digits;
}

std::int64_t Rational::round_half_away_from_zero() const {
  const bool negative = num_ < 0;
  const i128 p = negative ? -i128(num_) : i128(num_);
  const i128 q = den_;
  const i128 rounded = (2 * p + q) / (2 * q);
  return narrow_checked(negative ? -rounded : rounded);
}

}  // namespace fairaudit
