#ifndef QHAAR_TRANSFORM_HPP_
#define QHAAR_TRANSFORM_HPP_

// Analysis and synthesis in the basis {2^{j/2} psi~(A^j . - a)}.
//
// Coefficients are inner products against explicitly constructed basis
// functions. The substitution y = A^j x turns every level into a plain
// shift correlation:
//
//   <f, 2^{j/2} psi~(A^j . - a)> = 2^{-j/2} <f o A^{-j}, psi~(. - a)>.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhaar/mra.hpp"
#include "qhaar/stepfn.hpp"
#include "qhaar/waveletgen.hpp"

namespace qhaar {

namespace detail {

/// 64-bit FNV-1a over s and the IEEE bit patterns of the values, as 16 hex digits.
template <typename Range>
std::string complex_digest(int s, const Range& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (word >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(s));
  for (const Complex& z : values) {
    mix(std::bit_cast<std::uint64_t>(z.real()));
    mix(std::bit_cast<std::uint64_t>(z.imag()));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

/// Digest of alpha in N = 2^s l + k order.
inline std::string alpha_digest(const AlphaGrid& alpha) {
  const auto& v = alpha.vector();
  return detail::complex_digest(alpha.s(), std::vector<Complex>(v.data(), v.data() + v.size()));
}

/// Digest of gamma, row-major in q.
inline std::string gamma_digest(const GammaGrid& gamma) {
  std::vector<Complex> values;
  for (int q = 0; q < gamma.side(); ++q) {
    for (int p = 0; p < gamma.side(); ++p) values.push_back(gamma(q, p));
  }
  return detail::complex_digest(gamma.s(), values);
}

/// A wavelet psi~ together with the coefficients that define it.
class WaveletBasis {
 public:
  explicit WaveletBasis(AlphaGrid alpha)
      : alpha_(std::move(alpha)), function_(synthesize_wavelet(alpha_)), digest_(alpha_digest(alpha_)) {}

  /// The basis generated by psi itself, written at shift level s.
  static WaveletBasis standard(int s = 1) { return WaveletBasis(AlphaGrid::unit(s)); }

  int s() const { return alpha_.s(); }
  const AlphaGrid& alpha() const { return alpha_; }
  const StepFunction2D& function() const { return function_; }
  const std::string& digest() const { return digest_; }

 private:
  AlphaGrid alpha_;
  StepFunction2D function_;
  std::string digest_;
};

/// 2^{j/2} g(A^j . - a)
inline StepFunction2D basis_function(const StepFunction2D& g, int j, const DyadicVec2& a) {
  return Complex(std::pow(2.0, 0.5 * j)) * dilate_power(translate(g, a), j);
}

struct CoefficientSet {
  int s = 1;
  std::string alpha_digest;
  int j_min = 0;
  int j_max = 0;
  std::map<DyadicVec2, Complex> scaling;                  // level j_min
  std::map<std::pair<int, DyadicVec2>, Complex> wavelet;  // levels j_min .. j_max - 1

  double squared_sum() const {
    double total = 0.0;
    for (const auto& [a, c] : scaling) total += std::norm(c);
    for (const auto& [key, c] : wavelet) total += std::norm(c);
    return total;
  }
};

/// j_min defaults to -2n for a canonical f with support exponent n.
inline int default_j_min(const StepFunction2D& f) { return -2 * canonicalize(f).support_exp(); }

inline CoefficientSet analyze(const StepFunction2D& f, const WaveletBasis& basis, int j_min) {
  const StepFunction2D fc = canonicalize(f);
  CoefficientSet out;
  out.s = basis.s();
  out.alpha_digest = basis.digest();
  out.j_min = j_min;
  out.j_max = 2 * fc.scale();
  if (j_min > out.j_max) {
    throw std::invalid_argument("analyze: j_min = " + std::to_string(j_min) + " exceeds j_max = 2m = " +
                                std::to_string(out.j_max));
  }
  if (fc.is_zero()) return out;

  // level holds f o A^{-j}
  StepFunction2D level = dilate_power(fc, -j_min);
  for (const auto& [a, v] : shift_correlation(level, make_phi())) {
    out.scaling.emplace(a, std::pow(2.0, -0.5 * j_min) * v);
  }
  for (int j = j_min; j < out.j_max; ++j) {
    const double weight = std::pow(2.0, -0.5 * j);
    for (const auto& [a, v] : shift_correlation(level, basis.function())) {
      out.wavelet.emplace(std::make_pair(j, a), weight * v);
    }
    level = dilate(level, QuincunxMatrix::A_inverse());
  }
  return out;
}

inline CoefficientSet analyze(const StepFunction2D& f, const WaveletBasis& basis) {
  return analyze(f, basis, default_j_min(f));
}

/// sum c_{j,a} 2^{j/2} psi~(A^j . - a) + sum s_a 2^{j_min/2} phi(A^{j_min} . - a)
inline StepFunction2D synthesize(const CoefficientSet& coefficients, const WaveletBasis& basis) {
  if (coefficients.s != basis.s() || coefficients.alpha_digest != basis.digest()) {
    throw std::invalid_argument("synthesize: coefficient set was produced with a different wavelet");
  }
  LinearCombination<2> total;

  std::map<int, LinearCombination<2>> levels;
  for (const auto& [key, c] : coefficients.wavelet) {
    levels[key.first].add(c, translate(basis.function(), key.second));
  }
  for (const auto& [j, acc] : levels) {
    total.add(std::pow(2.0, 0.5 * j), dilate_power(acc.build(), j));
  }

  if (!coefficients.scaling.empty()) {
    const StepFunction2D phi = make_phi();
    LinearCombination<2> coarse;
    for (const auto& [a, c] : coefficients.scaling) coarse.add(c, translate(phi, a));
    total.add(std::pow(2.0, 0.5 * coefficients.j_min), dilate_power(coarse.build(), coefficients.j_min));
  }
  return canonicalize(total.build());
}

struct ParsevalReport {
  double function_norm_sq = 0.0;
  double coefficient_norm_sq = 0.0;
  double difference = 0.0;
  double tolerance = 1e-10;
  bool pass = false;
};

inline ParsevalReport parseval_check(const StepFunction2D& f, const WaveletBasis& basis, int j_min,
                                     double tolerance = 1e-10) {
  ParsevalReport r;
  r.tolerance = tolerance;
  r.function_norm_sq = squared_norm(f);
  r.coefficient_norm_sq = analyze(f, basis, j_min).squared_sum();
  r.difference = std::abs(r.function_norm_sq - r.coefficient_norm_sq);
  r.pass = r.difference < tolerance;
  return r;
}

}  // namespace qhaar

#endif  // QHAAR_TRANSFORM_HPP_
