#ifndef QHAAR_TESTS_ORACLES_HPP_
#define QHAAR_TESTS_ORACLES_HPP_

// Reference computations that avoid the library's cell/key machinery:
// pointwise formulas in exact dyadic arithmetic and brute-force sums.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qhaar/qhaar.hpp"

namespace oracle {

using qhaar::Complex;
using qhaar::DyadicRational;
using qhaar::DyadicVec2;
using qhaar::StepFunction2D;

inline DyadicRational half(const DyadicRational& x) { return x.times_pow2(-1); }

inline bool in_z2(const DyadicVec2& x) { return x.x1.is_integral() && x.x2.is_integral(); }

/// phi(Ax) - phi(Ax - (1/2, 1/2)) straight from the definition.
inline double psi_at(const DyadicVec2& x) {
  const DyadicVec2 ax{half(x.x1 + x.x2), half(x.x2 - x.x1)};
  const DyadicRational h = DyadicRational::of(1, 1);
  double v = 0.0;
  if (in_z2(ax)) v += 1.0;
  if (in_z2({ax.x1 - h, ax.x2 - h})) v -= 1.0;
  return v;
}

/// e^{2 pi i {x}} with {x} read off the low bits of the numerator.
inline Complex character_at(const DyadicRational& x) {
  if (x.is_integral()) return 1.0;
  const auto e = x.exponent();
  const qhaar::BigInt mod = qhaar::BigInt(1) << static_cast<unsigned>(e);
  qhaar::BigInt r = x.numerator() % mod;
  if (r < 0) r += mod;
  const double frac = std::ldexp(static_cast<double>(r), -static_cast<int>(e));
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

/// +1 iff n1 + n2 is even.
inline int parity_sign(std::int64_t n1, std::int64_t n2) { return ((n1 + n2) % 2 == 0) ? 1 : -1; }

/// Sum over every point r / 2^n, r in [0, 2^(m+n))^2, of f conj(g) 2^(-2m).
inline Complex brute_inner_product(const StepFunction2D& f, const StepFunction2D& g) {
  const int m = std::max(f.scale(), g.scale());
  const int n = std::max(f.support_exp(), g.support_exp());
  const std::int64_t side = std::int64_t{1} << (m + n);
  Complex sum{};
  for (std::int64_t r1 = 0; r1 < side; ++r1) {
    for (std::int64_t r2 = 0; r2 < side; ++r2) {
      const DyadicVec2 x{DyadicRational::of(r1, n), DyadicRational::of(r2, n)};
      sum += f(x) * std::conj(g(x));
    }
  }
  return sum * std::ldexp(1.0, -2 * m);
}

inline double brute_squared_norm(const StepFunction2D& f) { return brute_inner_product(f, f).real(); }

/// Random complex values on a full (m, n) grid, each cell nonzero with probability `density`.
inline StepFunction2D random_step_function(std::mt19937_64& rng, int m, int n, double density = 0.6) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution keep(density);
  const std::uint64_t side = std::uint64_t{1} << (m + n);
  StepFunction2D::Cells cells;
  for (std::uint64_t r1 = 0; r1 < side; ++r1) {
    for (std::uint64_t r2 = 0; r2 < side; ++r2) {
      if (keep(rng)) cells.emplace(StepFunction2D::Key{r1, r2}, Complex(u(rng), u(rng)));
    }
  }
  return StepFunction2D(m, n, std::move(cells));
}

inline qhaar::StepFunction1D random_step_function_1d(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::uint64_t side = std::uint64_t{1} << (m + n);
  qhaar::StepFunction1D::Cells cells;
  for (std::uint64_t r = 0; r < side; ++r) cells.emplace(qhaar::StepFunction1D::Key{r}, Complex(u(rng), u(rng)));
  return qhaar::StepFunction1D(m, n, std::move(cells));
}

/// k / 2^e with |k| < 2^bits and e in [-3, max_exp].
inline DyadicRational random_dyadic(std::mt19937_64& rng, int max_exp = 6, int bits = 10) {
  std::uniform_int_distribution<std::int64_t> num(-(std::int64_t{1} << bits), std::int64_t{1} << bits);
  std::uniform_int_distribution<int> exp(-3, max_exp);
  return DyadicRational::of(num(rng), exp(rng));
}

inline DyadicVec2 random_point(std::mt19937_64& rng, int max_exp = 6) {
  return {random_dyadic(rng, max_exp), random_dyadic(rng, max_exp)};
}

/// The closed-form map restated with std::polar phases.
inline qhaar::ComplexMatrix closed_form_alpha_polar(int s, const qhaar::ComplexMatrix& gamma) {
  const int n = 1 << s;
  const double pi = std::numbers::pi;
  qhaar::ComplexMatrix kl(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Complex sum{};
      for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) sum += std::polar(1.0, -2.0 * pi * (q * k - l * p) / n) * gamma(q, p);
      }
      const int sign_exp = l == 0 ? k : k - l + 1;
      const double sign = (sign_exp % 2 == 0) ? 1.0 : -1.0;
      const double phase = -pi * (l == 0 ? k : k - l) / n;
      kl(k, l) = sign * std::polar(1.0, phase) * sum / static_cast<double>(n * n);
    }
  }
  return kl;
}

/// Row-N expansion of f in {psi(. - a_M)} by brute inner products.
inline qhaar::ComplexVector brute_psi_coefficients(const StepFunction2D& f, int s) {
  const auto shifts = qhaar::enumerate_shifts(s);
  const StepFunction2D psi = qhaar::make_psi();
  qhaar::ComplexVector out(static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = brute_inner_product(f, qhaar::translate(psi, shifts[i]));
  }
  return out;
}

}  // namespace oracle

#endif  // QHAAR_TESTS_ORACLES_HPP_
