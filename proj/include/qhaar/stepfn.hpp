#ifndef QHAAR_STEPFN_HPP_
#define QHAAR_STEPFN_HPP_

// Locally constant, compactly supported complex functions on Q_2 and Q_2^2.
//
// A StepFunction<D> with scale m and support exponent n is constant on the
// cosets of 2^m Z_2^D and vanishes outside the ball B_n = {|x|_2 <= 2^n}.
// The cosets inside B_n are keyed by integer grid indices r in [0, 2^(m+n))
// per coordinate; the canonical representative of key r is r / 2^n, whose
// binary digits occupy positions -n .. m-1.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qhaar/padic.hpp"

namespace qhaar {

/// Upper bound on m + n so that grid indices fit in 64-bit words.
inline constexpr int kMaxGridBits = 60;

template <std::size_t D>
using PointOf = std::conditional_t<D == 1, DyadicRational, DyadicVec2>;

namespace detail {

inline const DyadicRational& coord(const DyadicRational& x, std::size_t) { return x; }
inline const DyadicRational& coord(const DyadicVec2& x, std::size_t i) { return x[i]; }

inline std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

inline void check_grid_bits(int bits, const char* where) {
  if (bits > kMaxGridBits) {
    throw std::overflow_error(std::string(where) + ": grid exceeds " + std::to_string(kMaxGridBits) + " bits");
  }
}

/// Calls fn(index) for every index in [0, count)^D.
template <std::size_t D, typename Fn>
void for_each_multi_index(std::uint64_t count, Fn&& fn) {
  std::array<std::uint64_t, D> idx{};
  if (count == 0) return;
  while (true) {
    fn(idx);
    std::size_t d = 0;
    while (d < D && ++idx[d] == count) idx[d++] = 0;
    if (d == D) return;
  }
}

}  // namespace detail

template <std::size_t D>
class StepFunction {
  static_assert(D == 1 || D == 2, "StepFunction supports Q_2 and Q_2^2");

 public:
  using Key = std::array<std::uint64_t, D>;
  using Cells = std::map<Key, Complex>;
  using Point = PointOf<D>;

  static constexpr std::size_t dimension = D;

  /// The zero function, with the (m, n) = (0, 0) convention.
  StepFunction() = default;

  StepFunction(int scale, int support_exp, Cells cells)
      : scale_(scale), support_(support_exp), cells_(std::move(cells)) {
    if (scale_ < -support_) throw std::invalid_argument("StepFunction: scale must be >= -support_exp");
    detail::check_grid_bits(grid_bits(), "StepFunction");
    const std::uint64_t bound = std::uint64_t{1} << grid_bits();
    for (auto it = cells_.begin(); it != cells_.end();) {
      for (std::uint64_t r : it->first) {
        if (r >= bound) throw std::invalid_argument("StepFunction: cell key outside the support grid");
      }
      it = it->second == Complex{} ? cells_.erase(it) : std::next(it);
    }
  }

  int scale() const { return scale_; }
  int support_exp() const { return support_; }
  int grid_bits() const { return scale_ + support_; }
  const Cells& cells() const { return cells_; }
  bool is_zero() const { return cells_.empty(); }

  /// Haar measure of one cell, 2^(-D m).
  double cell_measure() const { return std::ldexp(1.0, -static_cast<int>(D) * scale_); }

  Point representative(const Key& key) const {
    if constexpr (D == 1) {
      return DyadicRational::of(static_cast<std::int64_t>(key[0]), support_);
    } else {
      return {DyadicRational::of(static_cast<std::int64_t>(key[0]), support_),
              DyadicRational::of(static_cast<std::int64_t>(key[1]), support_)};
    }
  }

  Complex value_at(const Key& key) const {
    auto it = cells_.find(key);
    return it == cells_.end() ? Complex{} : it->second;
  }

  /// Grid key of the cell containing x, or nullopt when |x|_2 > 2^n.
  std::optional<Key> key_of(const Point& x) const {
    Key key{};
    const BigInt modulus = BigInt(1) << static_cast<unsigned>(grid_bits());
    for (std::size_t i = 0; i < D; ++i) {
      const DyadicRational& c = detail::coord(x, i);
      if (c.is_zero()) continue;
      const std::int64_t shift = support_ - c.exponent();
      if (shift < 0) return std::nullopt;
      BigInt y = (c.numerator() << static_cast<unsigned>(shift)) % modulus;
      if (y < 0) y += modulus;
      key[i] = static_cast<std::uint64_t>(y);
    }
    return key;
  }

  Complex operator()(const Point& x) const {
    auto key = key_of(x);
    return key ? value_at(*key) : Complex{};
  }

  /// Value at the point w * 2^-precision, for machine-sized coordinates.
  Complex value_at_units(const std::array<std::int64_t, D>& w, int precision) const {
    Key key{};
    const std::uint64_t mask = detail::low_mask(grid_bits());
    for (std::size_t i = 0; i < D; ++i) {
      const std::int64_t c = w[i];
      if (c == 0) continue;
      const int drop = precision - support_;
      if (drop <= 0) {
        key[i] = (static_cast<std::uint64_t>(c) << -drop) & mask;
      } else {
        if (drop >= 63 || (static_cast<std::uint64_t>(c) & detail::low_mask(drop)) != 0) return {};
        key[i] = static_cast<std::uint64_t>(c >> drop) & mask;
      }
    }
    return value_at(key);
  }

 private:
  int scale_ = 0;
  int support_ = 0;
  Cells cells_;
};

using StepFunction1D = StepFunction<1>;
using StepFunction2D = StepFunction<2>;

template <std::size_t D>
Complex evaluate(const StepFunction<D>& f, const PointOf<D>& x) {
  return f(x);
}

/// Same function on the finer grid (scale, support_exp); both must be >= the current ones.
template <std::size_t D>
StepFunction<D> refine(const StepFunction<D>& f, int scale, int support_exp) {
  if (scale < f.scale() || support_exp < f.support_exp()) {
    throw std::invalid_argument("refine: target grid is coarser than the function");
  }
  detail::check_grid_bits(scale + support_exp, "refine");
  if (scale == f.scale() && support_exp == f.support_exp()) return f;

  const int lift = support_exp - f.support_exp();
  const int fine_offset = support_exp + f.scale();
  const std::uint64_t subdivisions = std::uint64_t{1} << (scale - f.scale());
  typename StepFunction<D>::Cells out;
  for (const auto& [key, value] : f.cells()) {
    typename StepFunction<D>::Key base;
    for (std::size_t i = 0; i < D; ++i) base[i] = key[i] << lift;
    detail::for_each_multi_index<D>(subdivisions, [&](const auto& t) {
      typename StepFunction<D>::Key k;
      for (std::size_t i = 0; i < D; ++i) k[i] = base[i] + (t[i] << fine_offset);
      out.emplace(k, value);
    });
  }
  return StepFunction<D>(scale, support_exp, std::move(out));
}

/// Minimal representation: smallest support ball, coarsest scale, no zero cells.
template <std::size_t D>
StepFunction<D> canonicalize(const StepFunction<D>& f) {
  using Key = typename StepFunction<D>::Key;
  if (f.is_zero()) return {};

  int m = f.scale();
  int n = f.support_exp();
  int n_min = -m;
  for (const auto& [key, value] : f.cells()) {
    for (std::uint64_t r : key) {
      if (r != 0) n_min = std::max(n_min, n - std::countr_zero(r));
    }
  }
  const int drop = n - n_min;
  typename StepFunction<D>::Cells cells;
  for (const auto& [key, value] : f.cells()) {
    Key k;
    for (std::size_t i = 0; i < D; ++i) k[i] = key[i] >> drop;
    cells.emplace(k, value);
  }
  n = n_min;

  constexpr std::size_t kChildren = std::size_t{1} << D;
  while (m - 1 >= -n && cells.size() % kChildren == 0) {
    const std::uint64_t mask = detail::low_mask(m - 1 + n);
    std::map<Key, std::pair<Complex, std::size_t>> groups;
    bool uniform = true;
    for (const auto& [key, value] : cells) {
      Key parent;
      for (std::size_t i = 0; i < D; ++i) parent[i] = key[i] & mask;
      auto [it, inserted] = groups.try_emplace(parent, value, 0);
      if (!inserted && it->second.first != value) {
        uniform = false;
        break;
      }
      ++it->second.second;
    }
    if (!uniform) break;
    if (!std::all_of(groups.begin(), groups.end(), [](const auto& g) { return g.second.second == kChildren; })) break;
    cells.clear();
    for (const auto& [key, g] : groups) cells.emplace(key, g.first);
    --m;
  }
  return StepFunction<D>(m, n, std::move(cells));
}

/// Function equality (representation independent, exact on values).
template <std::size_t D>
bool operator==(const StepFunction<D>& a, const StepFunction<D>& b) {
  const auto ca = canonicalize(a);
  const auto cb = canonicalize(b);
  return ca.scale() == cb.scale() && ca.support_exp() == cb.support_exp() && ca.cells() == cb.cells();
}

/// Accumulates sum c_i f_i on a grid that grows to the maxima of the inputs' parameters.
template <std::size_t D>
class LinearCombination {
 public:
  LinearCombination() = default;

  LinearCombination& add(Complex coefficient, const StepFunction<D>& f) {
    if (!started_) {
      scale_ = f.scale();
      support_ = f.support_exp();
      started_ = true;
    } else if (f.scale() > scale_ || f.support_exp() > support_) {
      regrid(std::max(scale_, f.scale()), std::max(support_, f.support_exp()));
    }
    if (coefficient == Complex{}) return *this;
    const auto aligned = refine(f, scale_, support_);
    for (const auto& [key, value] : aligned.cells()) cells_[key] += coefficient * value;
    return *this;
  }

  StepFunction<D> build() const {
    if (!started_) return {};
    return StepFunction<D>(scale_, support_, cells_);
  }

 private:
  void regrid(int scale, int support_exp) {
    auto grown = refine(StepFunction<D>(scale_, support_, std::move(cells_)), scale, support_exp);
    cells_ = grown.cells();
    scale_ = scale;
    support_ = support_exp;
  }

  bool started_ = false;
  int scale_ = 0;
  int support_ = 0;
  typename StepFunction<D>::Cells cells_;
};

template <std::size_t D>
StepFunction<D> lincomb(const std::vector<std::pair<Complex, StepFunction<D>>>& terms) {
  LinearCombination<D> acc;
  for (const auto& [c, f] : terms) acc.add(c, f);
  return acc.build();
}

template <std::size_t D>
StepFunction<D> operator+(const StepFunction<D>& a, const StepFunction<D>& b) {
  return LinearCombination<D>().add(1.0, a).add(1.0, b).build();
}

template <std::size_t D>
StepFunction<D> operator-(const StepFunction<D>& a, const StepFunction<D>& b) {
  return LinearCombination<D>().add(1.0, a).add(-1.0, b).build();
}

template <std::size_t D>
StepFunction<D> operator*(Complex c, const StepFunction<D>& f) {
  return LinearCombination<D>().add(c, f).build();
}

/// x -> f(x - a)
template <std::size_t D>
StepFunction<D> translate(const StepFunction<D>& f, const PointOf<D>& a) {
  int support = f.support_exp();
  for (std::size_t i = 0; i < D; ++i) {
    const Valuation v = valuation(detail::coord(a, i));
    if (!v.is_infinite()) support = std::max<int>(support, static_cast<int>(-v.value()));
  }
  const auto lifted = refine(f, f.scale(), support);
  if (f.is_zero()) return lifted;
  const auto offset = lifted.key_of(a);
  const std::uint64_t mask = detail::low_mask(lifted.grid_bits());
  typename StepFunction<D>::Cells out;
  for (const auto& [key, value] : lifted.cells()) {
    typename StepFunction<D>::Key k;
    for (std::size_t i = 0; i < D; ++i) k[i] = (key[i] + (*offset)[i]) & mask;
    out.emplace(k, value);
  }
  return StepFunction<D>(lifted.scale(), support, std::move(out));
}

/// x -> f(2^e x). The cell keys are unchanged; (m, n) becomes (m - e, n + e).
template <std::size_t D>
StepFunction<D> dilate_pow2(const StepFunction<D>& f, int e) {
  return StepFunction<D>(f.scale() - e, f.support_exp() + e, f.cells());
}

namespace detail {

// x -> f(A x): the preimage of a cell r + 2^m Z^2 is A^-1 r + A^-1 2^m Z^2,
// two cosets of 2^(m+1) Z^2.
inline StepFunction2D dilate_by_A(const StepFunction2D& f) {
  const int m = f.scale() + 1;
  const int n = f.support_exp() + 1;
  check_grid_bits(m + n, "dilate");
  const std::uint64_t mask = low_mask(m + n);
  const std::uint64_t half = std::uint64_t{1} << (m + n - 1);
  StepFunction2D::Cells out;
  for (const auto& [key, value] : f.cells()) {
    const std::uint64_t a = (2 * (key[0] - key[1])) & mask;
    const std::uint64_t b = (2 * (key[0] + key[1])) & mask;
    out.emplace(StepFunction2D::Key{a, b}, value);
    out.emplace(StepFunction2D::Key{(a + half) & mask, (b + half) & mask}, value);
  }
  return StepFunction2D(m, n, std::move(out));
}

// x -> f(A^-1 x): the preimage of a cell is A r + A 2^m Z^2, eight cosets of 2^(m+1) Z^2.
inline StepFunction2D dilate_by_A_inverse(const StepFunction2D& f) {
  const int m = f.scale() + 1;
  const int n = f.support_exp() + 1;
  check_grid_bits(m + n, "dilate");
  const std::uint64_t mask = low_mask(m + n);
  const std::uint64_t half = std::uint64_t{1} << (m + n - 1);
  const std::uint64_t quarter = std::uint64_t{1} << (m + n - 2);
  StepFunction2D::Cells out;
  for (const auto& [key, value] : f.cells()) {
    const std::uint64_t a = key[0] + key[1];
    const std::uint64_t b = key[1] - key[0];
    for (std::uint64_t centre : {std::uint64_t{0}, quarter}) {
      for (std::uint64_t e1 : {std::uint64_t{0}, half}) {
        for (std::uint64_t e2 : {std::uint64_t{0}, half}) {
          out.emplace(StepFunction2D::Key{(a + centre + e1) & mask, (b + centre + e2) & mask}, value);
        }
      }
    }
  }
  return StepFunction2D(m, n, std::move(out));
}

}  // namespace detail

/// x -> f(T x), canonicalized.
inline StepFunction2D dilate(const StepFunction2D& f, const QuincunxMatrix& t) {
  if (f.is_zero()) return {};
  switch (t.tag()) {
    case QuincunxTag::A: return canonicalize(detail::dilate_by_A(f));
    case QuincunxTag::A_inverse: return canonicalize(detail::dilate_by_A_inverse(f));
    case QuincunxTag::A_squared: return dilate(dilate(f, QuincunxMatrix::A()), QuincunxMatrix::A());
    case QuincunxTag::A_inverse_squared:
      return dilate(dilate(f, QuincunxMatrix::A_inverse()), QuincunxMatrix::A_inverse());
  }
  throw std::logic_error("unknown quincunx tag");
}

/// x -> f(A^j x) for any integer j (negative j applies A^-1).
inline StepFunction2D dilate_power(const StepFunction2D& f, int j) {
  StepFunction2D g = f;
  const QuincunxMatrix step = j >= 0 ? QuincunxMatrix::A() : QuincunxMatrix::A_inverse();
  for (int i = 0; i < std::abs(j); ++i) g = dilate(g, step);
  return g;
}

/// <f, g> = integral of f * conj(g) against the Haar measure (Z_2^D has measure 1).
template <std::size_t D>
Complex inner_product(const StepFunction<D>& f, const StepFunction<D>& g) {
  if (f.is_zero() || g.is_zero()) return {};
  const int scale = std::max(f.scale(), g.scale());
  // Iterate over whichever side has fewer cells after refinement.
  const auto refined_count = [&](const StepFunction<D>& h) {
    return static_cast<double>(h.cells().size()) * std::ldexp(1.0, static_cast<int>(D) * (scale - h.scale()));
  };
  if (refined_count(g) < refined_count(f)) return std::conj(inner_product(g, f));

  const auto fine = refine(f, scale, f.support_exp());
  const int precision = std::max(f.support_exp(), g.support_exp());
  const int lift = precision - f.support_exp();
  Complex sum{};
  for (const auto& [key, value] : fine.cells()) {
    std::array<std::int64_t, D> w;
    for (std::size_t i = 0; i < D; ++i) w[i] = static_cast<std::int64_t>(key[i] << lift);
    const Complex other = g.value_at_units(w, precision);
    if (other != Complex{}) sum += value * std::conj(other);
  }
  return sum * fine.cell_measure();
}

template <std::size_t D>
double squared_norm(const StepFunction<D>& f) {
  double sum = 0.0;
  for (const auto& [key, value] : f.cells()) sum += std::norm(value);
  return sum * f.cell_measure();
}

template <std::size_t D>
double norm(const StepFunction<D>& f) {
  return std::sqrt(squared_norm(f));
}

/// Largest |f(x) - g(x)| over Q_2^D.
template <std::size_t D>
double max_abs_difference(const StepFunction<D>& f, const StepFunction<D>& g) {
  double worst = 0.0;
  const auto diff = f - g;
  for (const auto& [key, value] : diff.cells()) worst = std::max(worst, std::abs(value));
  return worst;
}

/// (f (x) g)(x1, x2) = f(x1) g(x2)
inline StepFunction2D tensor(const StepFunction1D& f, const StepFunction1D& g) {
  if (f.is_zero() || g.is_zero()) return {};
  const int m = std::max(f.scale(), g.scale());
  const int n = std::max(f.support_exp(), g.support_exp());
  const auto ff = refine(f, m, n);
  const auto gg = refine(g, m, n);
  StepFunction2D::Cells out;
  for (const auto& [kf, vf] : ff.cells()) {
    for (const auto& [kg, vg] : gg.cells()) out.emplace(StepFunction2D::Key{kf[0], kg[0]}, vf * vg);
  }
  return StepFunction2D(m, n, std::move(out));
}

/// Characteristic function of center + 2^-radius_exp Z_2^2, i.e. the ball of radius 2^radius_exp.
inline StepFunction2D indicator_ball(const DyadicVec2& center, int radius_exp) {
  int support = radius_exp;
  for (std::size_t i = 0; i < 2; ++i) {
    const Valuation v = valuation(center[i]);
    if (!v.is_infinite()) support = std::max<int>(support, static_cast<int>(-v.value()));
  }
  const StepFunction2D grid(-radius_exp, support, {});
  StepFunction2D::Cells cells{{*grid.key_of(center), Complex{1.0, 0.0}}};
  return canonicalize(StepFunction2D(-radius_exp, support, std::move(cells)));
}

inline StepFunction1D indicator_ball(const DyadicRational& center, int radius_exp) {
  int support = radius_exp;
  const Valuation v = valuation(center);
  if (!v.is_infinite()) support = std::max<int>(support, static_cast<int>(-v.value()));
  const StepFunction1D grid(-radius_exp, support, {});
  StepFunction1D::Cells cells{{*grid.key_of(center), Complex{1.0, 0.0}}};
  return canonicalize(StepFunction1D(-radius_exp, support, std::move(cells)));
}

/// One entry a -> <f, g(. - a)> of a shift correlation.
template <std::size_t D>
struct ShiftCoefficient {
  PointOf<D> shift;
  Complex value;
};

/// <f, g(. - a)> for every a in I_2^D (the purely fractional dyadic points)
/// at which the supports can meet; entries that vanish identically are omitted.
/// Cost is (#cells of f at the common scale) x 2^(D max(n_g, 0)).
template <std::size_t D>
std::vector<ShiftCoefficient<D>> shift_correlation(const StepFunction<D>& f, const StepFunction<D>& g) {
  std::vector<ShiftCoefficient<D>> result;
  if (f.is_zero() || g.is_zero()) return result;

  const int scale = std::max({f.scale(), g.scale(), 0});
  const int reach = std::max(g.support_exp(), 0);
  const int precision = std::max(f.support_exp(), reach);
  detail::check_grid_bits(scale + precision, "shift_correlation");

  const auto fine = refine(f, scale, f.support_exp());
  const int lift = precision - f.support_exp();
  const std::uint64_t frac_mask = detail::low_mask(precision);
  const std::uint64_t lattice_step = std::uint64_t{1} << (precision - reach);

  std::map<std::array<std::uint64_t, D>, Complex> acc;
  for (const auto& [key, value] : fine.cells()) {
    std::array<std::int64_t, D> x;
    for (std::size_t i = 0; i < D; ++i) x[i] = static_cast<std::int64_t>(key[i] << lift);
    detail::for_each_multi_index<D>(std::uint64_t{1} << reach, [&](const auto& u) {
      std::array<std::uint64_t, D> a;
      std::array<std::int64_t, D> w;
      for (std::size_t i = 0; i < D; ++i) {
        a[i] = (static_cast<std::uint64_t>(x[i]) + u[i] * lattice_step) & frac_mask;
        w[i] = x[i] - static_cast<std::int64_t>(a[i]);
      }
      const Complex other = g.value_at_units(w, precision);
      if (other != Complex{}) acc[a] += value * std::conj(other);
    });
  }

  const double measure = fine.cell_measure();
  result.reserve(acc.size());
  for (const auto& [a, v] : acc) {
    PointOf<D> shift;
    if constexpr (D == 1) {
      shift = DyadicRational::of(static_cast<std::int64_t>(a[0]), precision);
    } else {
      shift = {DyadicRational::of(static_cast<std::int64_t>(a[0]), precision),
               DyadicRational::of(static_cast<std::int64_t>(a[1]), precision)};
    }
    result.push_back({std::move(shift), v * measure});
  }
  std::sort(result.begin(), result.end(), [](const auto& l, const auto& r) { return l.shift < r.shift; });
  return result;
}

}  // namespace qhaar

#endif  // QHAAR_STEPFN_HPP_
