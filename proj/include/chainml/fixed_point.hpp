#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "chainml/errors.hpp"

namespace chainml {

// Signed decimal fixed-point value at a fixed global scale of 10^9.
// This is the only numeric representation allowed on contract code paths:
// all arithmetic is exact integer arithmetic on the mantissa, every rounded
// operation rounds half away from zero, and overflow of the 64-bit mantissa
// throws instead of wrapping. Products and quotients go through 128-bit
// intermediates so nothing is lost before the final rounding.
class FixedPoint {
 public:
  using int128 = __int128;
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr FixedPoint() = default;

  static constexpr FixedPoint from_mantissa(std::int64_t m) { return FixedPoint(m); }

  static FixedPoint from_int(std::int64_t v) {
    return FixedPoint(checked_narrow(static_cast<int128>(v) * kScale));
  }

  // Nearest representable value of numerator/denominator, half away from zero.
  static FixedPoint from_ratio(std::int64_t numerator, std::int64_t denominator) {
    if (denominator <= 0) fail(ErrorCode::InvalidArgument, "denominator must be positive");
    const int128 widened = static_cast<int128>(numerator) * kScale;
    return FixedPoint(div_round_half_away(widened, denominator));
  }

  static constexpr FixedPoint zero() { return FixedPoint(0); }
  static constexpr FixedPoint one() { return FixedPoint(kScale); }

  constexpr std::int64_t mantissa() const { return m_; }

  friend FixedPoint operator+(FixedPoint a, FixedPoint b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a.m_, b.m_, &r)) fail(ErrorCode::Overflow, "fixed-point add");
    return FixedPoint(r);
  }

  friend FixedPoint operator-(FixedPoint a, FixedPoint b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a.m_, b.m_, &r)) fail(ErrorCode::Overflow, "fixed-point sub");
    return FixedPoint(r);
  }

  friend FixedPoint operator-(FixedPoint a) {
    if (a.m_ == std::numeric_limits<std::int64_t>::min())
      fail(ErrorCode::Overflow, "fixed-point negate");
    return FixedPoint(-a.m_);
  }

  friend FixedPoint operator*(FixedPoint a, FixedPoint b) {
    const int128 prod = static_cast<int128>(a.m_) * b.m_;
    return FixedPoint(div_round_half_away(prod, kScale));
  }

  friend FixedPoint operator/(FixedPoint a, FixedPoint b) {
    if (b.m_ == 0) fail(ErrorCode::DivisionByZero, "fixed-point divide");
    int128 num = static_cast<int128>(a.m_) * kScale;
    int128 den = b.m_;
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return FixedPoint(div_round_half_away(num, static_cast<std::int64_t>(den)));
  }

  FixedPoint& operator+=(FixedPoint b) { return *this = *this + b; }
  FixedPoint& operator-=(FixedPoint b) { return *this = *this - b; }

  friend constexpr auto operator<=>(FixedPoint a, FixedPoint b) = default;

  // "-12.000000500" style, always 9 fractional digits.
  std::string to_string() const {
    const bool neg = m_ < 0;
    // |INT64_MIN| does not fit in int64, widen first.
    unsigned long long mag =
        neg ? ~static_cast<unsigned long long>(m_) + 1ull : static_cast<unsigned long long>(m_);
    const unsigned long long whole = mag / kScale;
    const unsigned long long frac = mag % kScale;
    std::string f = std::to_string(frac);
    f.insert(0, 9 - f.size(), '0');
    return (neg ? "-" : "") + std::to_string(whole) + "." + f;
  }

  // Parses "-1", "0.5", "2.000000001". At most 9 fractional digits.
  static FixedPoint parse(std::string_view text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
      neg = text[i] == '-';
      ++i;
    }
    int128 whole = 0;
    std::size_t digits = 0;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++digits) {
      whole = whole * 10 + (text[i] - '0');
      if (whole > std::numeric_limits<std::int64_t>::max())
        fail(ErrorCode::Overflow, "fixed-point parse");
    }
    if (digits == 0) fail(ErrorCode::ParseError, "expected digits: " + std::string(text));
    int128 frac = 0;
    if (i < text.size() && text[i] == '.') {
      ++i;
      std::size_t fdigits = 0;
      for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++fdigits) {
        frac = frac * 10 + (text[i] - '0');
      }
      if (fdigits == 0 || fdigits > 9)
        fail(ErrorCode::ParseError, "expected 1..9 fractional digits: " + std::string(text));
      for (std::size_t k = fdigits; k < 9; ++k) frac *= 10;
    }
    if (i != text.size()) fail(ErrorCode::ParseError, "trailing characters: " + std::string(text));
    int128 m = whole * kScale + frac;
    if (neg) m = -m;
    return FixedPoint(checked_narrow(m));
  }

  double to_double() const { return static_cast<double>(m_) / kScale; }

 private:
  constexpr explicit FixedPoint(std::int64_t m) : m_(m) {}

  static std::int64_t checked_narrow(int128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      fail(ErrorCode::Overflow, "fixed-point mantissa");
    return static_cast<std::int64_t>(v);
  }

  // divisor > 0; rounds halves away from zero.
  static std::int64_t div_round_half_away(int128 n, std::int64_t d) {
    int128 q = n / d;
    int128 r = n % d;  // sign of n
    const int128 twice = 2 * (r < 0 ? -r : r);
    if (twice >= d) q += (n < 0) ? -1 : 1;
    return checked_narrow(q);
  }

  std::int64_t m_ = 0;
};

static_assert(sizeof(FixedPoint::int128) == 16);

}  // namespace chainml
