#ifndef QHAAR_PADIC_HPP_
#define QHAAR_PADIC_HPP_

// Exact 2-adic arithmetic on the dyadic rationals k/2^e.
//
// Every locally constant, compactly supported function on Q_2 or Q_2^2 is
// determined by its values on dyadic points, so the ring Z[1/2] is all that
// is needed to name points, shifts and coset representatives exactly.

#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <concepts>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace qhaar {

using Complex = std::complex<double>;
using BigInt = boost::multiprecision::cpp_int;

/// 2-adic valuation. The valuation of zero is the distinguished infinity
/// value, never a large finite integer.
class Valuation {
 public:
  constexpr Valuation() = default;  // infinity
  constexpr explicit Valuation(std::int64_t v) : value_(v) {}

  static constexpr Valuation infinity() { return Valuation(); }

  constexpr bool is_infinite() const { return !value_.has_value(); }

  std::int64_t value() const {
    if (!value_) throw std::domain_error("valuation of zero is infinite");
    return *value_;
  }

  friend constexpr bool operator==(const Valuation&, const Valuation&) = default;

  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (a.is_infinite() || b.is_infinite()) {
      return a.is_infinite() <=> b.is_infinite();
    }
    return *a.value_ <=> *b.value_;
  }

 private:
  std::optional<std::int64_t> value_;
};

/// Exact dyadic rational numerator / 2^exponent.
///
/// Canonical form: the numerator is odd, or the value is zero and the
/// exponent is 0. The exponent may be negative (12 = 3 / 2^-2).
class DyadicRational {
 public:
  DyadicRational() = default;

  DyadicRational(BigInt numerator, std::int64_t exponent = 0)  // NOLINT(google-explicit-constructor)
      : num_(std::move(numerator)), exp_(exponent) {
    normalize();
  }

  template <std::integral I>
  DyadicRational(I value)  // NOLINT(google-explicit-constructor)
      : DyadicRational(BigInt(value), 0) {}

  /// numerator / 2^exponent for machine-sized inputs.
  static DyadicRational of(std::int64_t numerator, std::int64_t exponent) {
    return DyadicRational(BigInt(numerator), exponent);
  }

  const BigInt& numerator() const { return num_; }
  std::int64_t exponent() const { return exp_; }
  bool is_zero() const { return num_.is_zero(); }

  /// True for 2-adic integers, i.e. valuation >= 0.
  bool is_integral() const { return is_zero() || exp_ <= 0; }

  /// Multiply by 2^k exactly.
  DyadicRational times_pow2(std::int64_t k) const {
    if (is_zero()) return {};
    DyadicRational r = *this;
    r.exp_ -= k;
    return r;
  }

  DyadicRational operator-() const {
    DyadicRational r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const std::int64_t e = std::max(a.exp_, b.exp_);
    BigInt n = (a.num_ << static_cast<unsigned>(e - a.exp_)) + (b.num_ << static_cast<unsigned>(e - b.exp_));
    return DyadicRational(std::move(n), e);
  }

  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) { return a + (-b); }

  friend DyadicRational operator*(const DyadicRational& a, const DyadicRational& b) {
    return DyadicRational(a.num_ * b.num_, a.exp_ + b.exp_);
  }

  DyadicRational& operator+=(const DyadicRational& o) { return *this = *this + o; }
  DyadicRational& operator-=(const DyadicRational& o) { return *this = *this - o; }
  DyadicRational& operator*=(const DyadicRational& o) { return *this = *this * o; }

  friend bool operator==(const DyadicRational& a, const DyadicRational& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }

  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const std::int64_t e = std::max(a.exp_, b.exp_);
    const BigInt lhs = a.num_ << static_cast<unsigned>(e - a.exp_);
    const BigInt rhs = b.num_ << static_cast<unsigned>(e - b.exp_);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  double to_double() const {
    // Scale by the bit length so huge numerators do not overflow early.
    if (is_zero()) return 0.0;
    const BigInt mag = boost::multiprecision::abs(num_);
    const auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(mag)) + 1;
    const std::int64_t drop = std::max<std::int64_t>(bits - 62, 0);
    const double head = static_cast<double>(static_cast<std::uint64_t>(mag >> static_cast<unsigned>(drop)));
    const double v = std::ldexp(head, static_cast<int>(drop - exp_));
    return num_ < 0 ? -v : v;
  }

  /// "num/2^exp", e.g. "5/2^3" or "3/2^-2".
  std::string to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

  static DyadicRational from_string(std::string_view text);

 private:
  void normalize() {
    if (num_.is_zero()) {
      exp_ = 0;
      return;
    }
    const auto tz = boost::multiprecision::lsb(boost::multiprecision::abs(num_));
    if (tz > 0) {
      num_ >>= tz;
      exp_ -= static_cast<std::int64_t>(tz);
    }
  }

  BigInt num_{0};
  std::int64_t exp_ = 0;
};

inline DyadicRational DyadicRational::from_string(std::string_view text) {
  const auto bad = [&] { return std::invalid_argument("malformed dyadic rational \"" + std::string(text) + "\""); };
  const auto slash = text.find("/2^");
  if (slash == std::string_view::npos || slash == 0) throw bad();
  std::string_view num_text = text.substr(0, slash);
  std::string_view exp_text = text.substr(slash + 3);

  std::string_view digits = num_text.front() == '-' ? num_text.substr(1) : num_text;
  if (digits.empty()) throw bad();
  for (char c : digits) {
    if (c < '0' || c > '9') throw bad();
  }

  std::int64_t exp = 0;
  const auto* first = exp_text.data();
  const auto* last = exp_text.data() + exp_text.size();
  auto [ptr, ec] = std::from_chars(first, last, exp);
  if (exp_text.empty() || ec != std::errc() || ptr != last) throw bad();

  return DyadicRational(BigInt(std::string(num_text)), exp);
}

inline Valuation valuation(const DyadicRational& x) {
  if (x.is_zero()) return Valuation::infinity();
  return Valuation(-x.exponent());
}

/// |x|_2 = 2^-valuation(x), exactly; |0|_2 = 0.
inline DyadicRational norm2(const DyadicRational& x) {
  if (x.is_zero()) return {};
  return DyadicRational(BigInt(1), -x.exponent());
}

/// {x}_2: the part of the 2-adic expansion with negative powers. Always in [0, 1).
inline DyadicRational frac_part(const DyadicRational& x) {
  if (x.exponent() <= 0) return {};
  const BigInt modulus = BigInt(1) << static_cast<unsigned>(x.exponent());
  BigInt r = x.numerator() % modulus;
  if (r < 0) r += modulus;
  return DyadicRational(std::move(r), x.exponent());
}

namespace detail {

/// e^{2 pi i r / 2^e} for 0 <= r < 2^e, e <= 62. Quarter turns are applied
/// exactly, so multiples of 1/4 come out exact.
inline Complex unit_root_reduced(std::uint64_t r, int e) {
  if (e < 2) {
    r <<= (2 - e);
    e = 2;
  }
  const std::uint64_t quarter = r >> (e - 2);
  const std::uint64_t rest = r & ((std::uint64_t{1} << (e - 2)) - 1);
  Complex z{1.0, 0.0};
  if (rest != 0) {
    const double angle = std::ldexp(static_cast<double>(rest), -(e - 2)) * (std::numbers::pi / 2.0);
    z = Complex(std::cos(angle), std::sin(angle));
  }
  switch (quarter & 3U) {
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    case 3: return {z.imag(), -z.real()};
    default: return z;
  }
}

}  // namespace detail

/// e^{2 pi i n / 2^e} for any integer n, 0 <= e <= 62.
inline Complex root_of_unity(std::int64_t n, int e) {
  if (e < 0 || e > 62) throw std::domain_error("root_of_unity: exponent out of range");
  const std::uint64_t mask = (std::uint64_t{1} << e) - 1;
  return detail::unit_root_reduced(static_cast<std::uint64_t>(n) & mask, e);
}

/// Additive character chi_2(x) = e^{2 pi i {x}_2}.
inline Complex character(const DyadicRational& x) {
  const DyadicRational f = frac_part(x);
  if (f.is_zero()) return {1.0, 0.0};
  std::int64_t e = f.exponent();
  BigInt r = f.numerator();
  if (e > 62) {
    // Bits below 2^-62 are beyond double resolution.
    r >>= static_cast<unsigned>(e - 62);
    e = 62;
  }
  return detail::unit_root_reduced(static_cast<std::uint64_t>(r), static_cast<int>(e));
}

/// A point of Q_2^2 with dyadic coordinates.
struct DyadicVec2 {
  DyadicRational x1;
  DyadicRational x2;

  const DyadicRational& operator[](std::size_t i) const { return i == 0 ? x1 : x2; }
  DyadicRational& operator[](std::size_t i) { return i == 0 ? x1 : x2; }

  friend DyadicVec2 operator+(const DyadicVec2& a, const DyadicVec2& b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend DyadicVec2 operator-(const DyadicVec2& a, const DyadicVec2& b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  DyadicVec2 operator-() const { return {-x1, -x2}; }

  friend bool operator==(const DyadicVec2&, const DyadicVec2&) = default;
  friend std::strong_ordering operator<=>(const DyadicVec2& a, const DyadicVec2& b) {
    if (auto c = a.x1 <=> b.x1; c != 0) return c;
    return a.x2 <=> b.x2;
  }

  std::string to_string() const { return "(" + x1.to_string() + ", " + x2.to_string() + ")"; }
};

inline Valuation valuation(const DyadicVec2& v) { return std::min(valuation(v.x1), valuation(v.x2)); }

/// max(|x1|_2, |x2|_2)
inline DyadicRational norm2(const DyadicVec2& v) { return std::max(norm2(v.x1), norm2(v.x2)); }

inline DyadicVec2 frac_part(const DyadicVec2& v) { return {frac_part(v.x1), frac_part(v.x2)}; }

/// 2x2 matrix with dyadic entries, row-major.
struct DyadicMatrix2 {
  std::array<std::array<DyadicRational, 2>, 2> m;

  DyadicVec2 operator*(const DyadicVec2& v) const {
    return {m[0][0] * v.x1 + m[0][1] * v.x2, m[1][0] * v.x1 + m[1][1] * v.x2};
  }

  DyadicMatrix2 operator*(const DyadicMatrix2& o) const {
    DyadicMatrix2 r;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
    }
    return r;
  }

  static DyadicMatrix2 identity() { return {{{{1, 0}, {0, 1}}}}; }

  friend bool operator==(const DyadicMatrix2&, const DyadicMatrix2&) = default;
};

enum class QuincunxTag { A, A_inverse, A_squared, A_inverse_squared };

/// A is the inverse of the quincunx matrix [[1,-1],[1,1]]; |det A|_2 = 2.
class QuincunxMatrix {
 public:
  constexpr explicit QuincunxMatrix(QuincunxTag tag) : tag_(tag) {}

  static constexpr QuincunxMatrix A() { return QuincunxMatrix(QuincunxTag::A); }
  static constexpr QuincunxMatrix A_inverse() { return QuincunxMatrix(QuincunxTag::A_inverse); }
  static constexpr QuincunxMatrix A_squared() { return QuincunxMatrix(QuincunxTag::A_squared); }
  static constexpr QuincunxMatrix A_inverse_squared() { return QuincunxMatrix(QuincunxTag::A_inverse_squared); }

  constexpr QuincunxTag tag() const { return tag_; }

  DyadicMatrix2 entries() const {
    const DyadicRational half = DyadicRational::of(1, 1);
    switch (tag_) {
      case QuincunxTag::A: return {{{{half, half}, {-half, half}}}};
      case QuincunxTag::A_inverse: return {{{{1, -1}, {1, 1}}}};
      case QuincunxTag::A_squared: return {{{{0, half}, {-half, 0}}}};
      case QuincunxTag::A_inverse_squared: return {{{{0, -2}, {2, 0}}}};
    }
    throw std::logic_error("unknown quincunx tag");
  }

  friend constexpr bool operator==(const QuincunxMatrix&, const QuincunxMatrix&) = default;

 private:
  QuincunxTag tag_;
};

inline DyadicVec2 apply_matrix(const QuincunxMatrix& t, const DyadicVec2& v) { return t.entries() * v; }

/// The shift lattice {(k/2^s, l/2^s)}, ordered by N = 2^s * l + k.
inline std::vector<DyadicVec2> enumerate_shifts(int s) {
  if (s < 0 || s > 30) throw std::invalid_argument("enumerate_shifts: s out of range");
  const std::int64_t side = std::int64_t{1} << s;
  std::vector<DyadicVec2> out;
  out.reserve(static_cast<std::size_t>(side * side));
  for (std::int64_t l = 0; l < side; ++l) {
    for (std::int64_t k = 0; k < side; ++k) out.push_back({DyadicRational::of(k, s), DyadicRational::of(l, s)});
  }
  return out;
}

}  // namespace qhaar

#endif  // QHAAR_PADIC_HPP_
