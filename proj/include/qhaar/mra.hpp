#ifndef QHAAR_MRA_HPP_
#define QHAAR_MRA_HPP_

// The quincunx Haar MRA on L^2(Q_2^2) and the separable Haar MRA it is the
// "square root" of: scaling functions, wavelets, finite slices of V_j and
// W_j, and the structural checks relating the two.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "qhaar/padic.hpp"
#include "qhaar/stepfn.hpp"

namespace qhaar {

/// phi = 1_{Z_2^2}
inline StepFunction2D make_phi() { return StepFunction2D(0, 0, {{{0, 0}, Complex{1.0, 0.0}}}); }

/// 1_{Z_2}
inline StepFunction1D make_phi_1d() { return StepFunction1D(0, 0, {{{0}, Complex{1.0, 0.0}}}); }

/// psi = phi(A.) - phi(A. - (1/2, 1/2))
inline StepFunction2D make_psi() {
  const StepFunction2D phi = make_phi();
  const DyadicVec2 centre{DyadicRational::of(1, 1), DyadicRational::of(1, 1)};
  const auto first = dilate(phi, QuincunxMatrix::A());
  const auto second = dilate(translate(phi, centre), QuincunxMatrix::A());
  return canonicalize(first - second);
}

/// psi(x) = chi_2(x / 2) 1_{Z_2}(x)
inline StepFunction1D univariate_haar_wavelet() {
  StepFunction1D::Cells cells;
  const StepFunction1D grid(1, 0, {});
  for (std::uint64_t r = 0; r < 2; ++r) {
    const DyadicRational x = grid.representative({r});
    cells.emplace(StepFunction1D::Key{r}, character(x.times_pow2(-1)));
  }
  return StepFunction1D(1, 0, std::move(cells));
}

/// Phi = 1_{Z_2} (x) 1_{Z_2}
inline StepFunction2D separable_scaling_function() { return tensor(make_phi_1d(), make_phi_1d()); }

/// (Psi^1, Psi^2, Psi^3) = (phi (x) psi, psi (x) phi, psi (x) psi)
inline std::tuple<StepFunction2D, StepFunction2D, StepFunction2D> separable_wavelets() {
  const auto phi = make_phi_1d();
  const auto psi = univariate_haar_wavelet();
  return {tensor(phi, psi), tensor(psi, phi), tensor(psi, psi)};
}

/// Sign s with psi(. + n) = s psi for integer n: +1 iff A n is integral.
inline int integer_shift_sign(const DyadicVec2& n) {
  if (!n.x1.is_integral() || !n.x2.is_integral()) {
    throw std::invalid_argument("integer_shift_sign: " + n.to_string() + " is not a 2-adic integer vector");
  }
  const DyadicVec2 image = apply_matrix(QuincunxMatrix::A(), n);
  return image.x1.is_integral() && image.x2.is_integral() ? 1 : -1;
}

enum class SpaceTag { QuincunxV, QuincunxW, SeparableV, SeparableW };

inline std::string to_string(SpaceTag tag) {
  switch (tag) {
    case SpaceTag::QuincunxV: return "quincunx_V";
    case SpaceTag::QuincunxW: return "quincunx_W";
    case SpaceTag::SeparableV: return "separable_V";
    case SpaceTag::SeparableW: return "separable_W";
  }
  return "unknown";
}

/// Orthonormal generators of V_j or W_j whose supports lie in B_t.
struct SpaceSlice {
  SpaceTag tag;
  int level;
  int support_exp;
  std::vector<StepFunction2D> basis;
  std::vector<DyadicVec2> shifts;      // shift a of each generator
  std::vector<int> components;         // separable wavelet index e in {1,2,3}; 0 otherwise
};

namespace detail {

inline std::vector<DyadicVec2> fractional_points(int radius_exp) {
  return enumerate_shifts(std::max(radius_exp, 0));
}

inline bool supported_in(const StepFunction2D& f, int t) {
  return !f.is_zero() && canonicalize(f).support_exp() <= t;
}

inline int ceil_half(int j) { return j >= 0 ? (j + 1) / 2 : -((-j) / 2); }

}  // namespace detail

/// Quincunx slices use 2^{j/2} g(A^j . - a); separable slices use 2^j G(2^-j . - a).
/// An empty slice is returned as an empty basis.
inline SpaceSlice space_slice(SpaceTag tag, int j, int t) {
  SpaceSlice slice{tag, j, t, {}, {}, {}};
  switch (tag) {
    case SpaceTag::QuincunxV:
    case SpaceTag::QuincunxW: {
      const StepFunction2D base = tag == SpaceTag::QuincunxV ? make_phi() : make_psi();
      const int radius = t + detail::ceil_half(j);
      if (radius < 0) return slice;
      const double weight = std::pow(2.0, 0.5 * j);
      for (const auto& a : detail::fractional_points(radius)) {
        auto g = dilate_power(translate(base, a), j);
        if (!detail::supported_in(g, t)) continue;
        slice.basis.push_back(canonicalize(Complex(weight) * g));
        slice.shifts.push_back(a);
        slice.components.push_back(0);
      }
      break;
    }
    case SpaceTag::SeparableV:
    case SpaceTag::SeparableW: {
      std::vector<StepFunction2D> bases;
      if (tag == SpaceTag::SeparableV) {
        bases.push_back(separable_scaling_function());
      } else {
        auto [w1, w2, w3] = separable_wavelets();
        bases = {w1, w2, w3};
      }
      const int radius = t + j;
      if (radius < 0) return slice;
      const double weight = std::pow(2.0, j);
      for (const auto& a : detail::fractional_points(radius)) {
        for (std::size_t e = 0; e < bases.size(); ++e) {
          auto g = dilate_pow2(translate(bases[e], a), -j);
          if (!detail::supported_in(g, t)) continue;
          slice.basis.push_back(canonicalize(Complex(weight) * g));
          slice.shifts.push_back(a);
          slice.components.push_back(tag == SpaceTag::SeparableW ? static_cast<int>(e) + 1 : 0);
        }
      }
      break;
    }
  }
  return slice;
}

/// Result of projecting each function of one family onto the span of an orthonormal family.
struct ProjectionResult {
  double max_residual = 0.0;
  std::size_t worst_index = 0;
};

/// ||g - sum_y <g, y> y|| maximized over g in `from`; `onto` must be orthonormal.
inline ProjectionResult max_projection_residual(const std::vector<StepFunction2D>& from,
                                                const std::vector<StepFunction2D>& onto) {
  ProjectionResult result;
  for (std::size_t i = 0; i < from.size(); ++i) {
    LinearCombination<2> residual;
    residual.add(1.0, from[i]);
    for (const auto& y : onto) {
      const Complex c = inner_product(from[i], y);
      if (c != Complex{}) residual.add(-c, y);
    }
    const double r = norm(residual.build());
    if (i == 0 || r > result.max_residual) {
      result.max_residual = r;
      result.worst_index = i;
    }
  }
  return result;
}

/// max |G - I| for the Gram matrix of a family.
inline double gram_deviation(const std::vector<StepFunction2D>& family) {
  double worst = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t k = i; k < family.size(); ++k) {
      const Complex g = inner_product(family[i], family[k]);
      worst = std::max(worst, std::abs(g - Complex(i == k ? 1.0 : 0.0)));
    }
  }
  return worst;
}

struct SquareRootReport {
  int t = 0;
  double tolerance = 1e-10;
  std::map<std::string, std::size_t> dims;
  double max_residual = 0.0;
  double max_gram_deviation = 0.0;
  bool wavelet_spaces_checked = false;
  bool pass = false;
  std::string failed_check;    // empty on success
  std::size_t failed_generator = 0;
};

/// On the B_t slice: separable V_0 = quincunx V_0, and (for t >= 1) separable
/// W_0 = quincunx W_0 (+) W_1, each direction checked by projection residuals.
inline SquareRootReport verify_square_root(int t, double tolerance = 1e-10) {
  if (t < 0) throw std::invalid_argument("verify_square_root: t must be >= 0");
  SquareRootReport report;
  report.t = t;
  report.tolerance = tolerance;

  const auto record = [&](const std::string& name, const ProjectionResult& r) {
    report.max_residual = std::max(report.max_residual, r.max_residual);
    if (report.failed_check.empty() && !(r.max_residual < tolerance)) {
      report.failed_check = name;
      report.failed_generator = r.worst_index;
    }
  };
  const auto gram = [&](const std::string& name, const std::vector<StepFunction2D>& family) {
    const double dev = gram_deviation(family);
    report.max_gram_deviation = std::max(report.max_gram_deviation, dev);
    if (report.failed_check.empty() && !(dev < tolerance)) report.failed_check = name;
  };
  const auto dims_match = [&](const std::string& name, std::size_t a, std::size_t b) {
    if (report.failed_check.empty() && a != b) report.failed_check = name;
  };

  const auto sep_v0 = space_slice(SpaceTag::SeparableV, 0, t);
  const auto quin_v0 = space_slice(SpaceTag::QuincunxV, 0, t);
  report.dims["separable_V0"] = sep_v0.basis.size();
  report.dims["quincunx_V0"] = quin_v0.basis.size();
  gram("gram_separable_V0", sep_v0.basis);
  gram("gram_quincunx_V0", quin_v0.basis);
  dims_match("dims_V0", sep_v0.basis.size(), quin_v0.basis.size());
  record("separable_V0_in_quincunx_V0", max_projection_residual(sep_v0.basis, quin_v0.basis));
  record("quincunx_V0_in_separable_V0", max_projection_residual(quin_v0.basis, sep_v0.basis));

  if (t >= 1) {
    report.wavelet_spaces_checked = true;
    const auto sep_w0 = space_slice(SpaceTag::SeparableW, 0, t);
    const auto quin_w0 = space_slice(SpaceTag::QuincunxW, 0, t);
    const auto quin_w1 = space_slice(SpaceTag::QuincunxW, 1, t);
    std::vector<StepFunction2D> quincunx = quin_w0.basis;
    quincunx.insert(quincunx.end(), quin_w1.basis.begin(), quin_w1.basis.end());

    report.dims["separable_W0"] = sep_w0.basis.size();
    report.dims["quincunx_W0"] = quin_w0.basis.size();
    report.dims["quincunx_W1"] = quin_w1.basis.size();
    gram("gram_separable_W0", sep_w0.basis);
    gram("gram_quincunx_W0_W1", quincunx);
    dims_match("dims_W0", sep_w0.basis.size(), quincunx.size());
    record("separable_W0_in_quincunx_W0_W1", max_projection_residual(sep_w0.basis, quincunx));
    record("quincunx_W0_W1_in_separable_W0", max_projection_residual(quincunx, sep_w0.basis));
  }

  report.pass = report.failed_check.empty();
  return report;
}

}  // namespace qhaar

#endif  // QHAAR_MRA_HPP_
