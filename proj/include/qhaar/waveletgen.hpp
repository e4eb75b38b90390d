#ifndef QHAAR_WAVELETGEN_HPP_
#define QHAAR_WAVELETGEN_HPP_

// Compactly supported wavelet functions of the quincunx Haar MRA.
//
// Any unit-modulus grid (gamma_qp), 0 <= p, q < 2^s, yields coefficients
// alpha_kl and the wavelet
//
//   psi~(x) = sum_{k,l} alpha_kl psi(x - (k/2^s, l/2^s)).
//
// The coefficients are computed two independent ways: the closed-form double
// sum, and the matrix route through the commutant of Lambda and Omega
// (C-diagonalized negacyclic blocks). The verifier trusts whichever route
// gives a unitary D.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qhaar/mra.hpp"
#include "qhaar/padic.hpp"
#include "qhaar/stepfn.hpp"

namespace qhaar {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using IntMatrix = Eigen::MatrixXi;

/// Default cap on s; matrices are 4^s x 4^s.
inline constexpr int kDefaultMaxS = 4;

inline constexpr double kModulusTolerance = 1e-12;

namespace detail {

inline int side_of(int s) {
  if (s < 1 || s > 15) throw std::invalid_argument("s must be in [1, 15], got " + std::to_string(s));
  return 1 << s;
}

}  // namespace detail

/// The unit-modulus parameters gamma_qp (row q, column p).
class GammaGrid {
 public:
  GammaGrid(int s, ComplexMatrix entries) : s_(s), entries_(std::move(entries)) {
    const int side = detail::side_of(s);
    if (entries_.rows() != side || entries_.cols() != side) {
      throw std::invalid_argument("gamma grid must be " + std::to_string(side) + "x" + std::to_string(side));
    }
    for (int q = 0; q < side; ++q) {
      for (int p = 0; p < side; ++p) {
        const double modulus = std::abs(entries_(q, p));
        if (!(std::abs(modulus - 1.0) <= kModulusTolerance)) {
          throw std::invalid_argument("gamma[" + std::to_string(q) + "][" + std::to_string(p) +
                                      "] has modulus " + std::to_string(modulus) + ", expected 1");
        }
      }
    }
  }

  static GammaGrid constant(int s, Complex value) {
    const int side = detail::side_of(s);
    return GammaGrid(s, ComplexMatrix::Constant(side, side, value));
  }

  int s() const { return s_; }
  int side() const { return 1 << s_; }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(int q, int p) const { return entries_(q, p); }

 private:
  int s_;
  ComplexMatrix entries_;
};

/// Coefficients alpha_kl; the vector view stores alpha_kl at N = 2^s l + k.
class AlphaGrid {
 public:
  AlphaGrid(int s, ComplexVector vec) : s_(s), vec_(std::move(vec)) {
    const int side = detail::side_of(s);
    if (vec_.size() != side * side) throw std::invalid_argument("alpha vector has the wrong length");
  }

  /// alpha_0 = (1, 0, ..., 0)
  static AlphaGrid unit(int s) {
    const int side = detail::side_of(s);
    ComplexVector v = ComplexVector::Zero(side * side);
    v(0) = 1.0;
    return AlphaGrid(s, std::move(v));
  }

  /// From the matrix (row k, column l).
  static AlphaGrid from_entries(int s, const ComplexMatrix& kl) {
    const int side = detail::side_of(s);
    if (kl.rows() != side || kl.cols() != side) throw std::invalid_argument("alpha grid has the wrong shape");
    ComplexVector v(side * side);
    for (int l = 0; l < side; ++l) {
      for (int k = 0; k < side; ++k) v(side * l + k) = kl(k, l);
    }
    return AlphaGrid(s, std::move(v));
  }

  int s() const { return s_; }
  int side() const { return 1 << s_; }
  const ComplexVector& vector() const { return vec_; }
  Complex operator()(int k, int l) const { return vec_(side() * l + k); }

  ComplexMatrix entries() const {
    ComplexMatrix m(side(), side());
    for (int l = 0; l < side(); ++l) {
      for (int k = 0; k < side(); ++k) m(k, l) = (*this)(k, l);
    }
    return m;
  }

  double norm() const { return vec_.norm(); }

 private:
  int s_;
  ComplexVector vec_;
};

/// Negacyclic shift and its block companions, plus the diagonalizing C.
struct MatrixBundle {
  int s = 0;
  IntMatrix negacyclic;  // subdiagonal ones, top-right -1; 2^s x 2^s
  IntMatrix lambda;      // block-diagonal copies of the negacyclic shift
  IntMatrix omega;       // block negacyclic shift with identity blocks
  ComplexMatrix c;       // c_pq = 2^{-s/2} (-1)^p e^{-pi i p (2q+1) / 2^s}
};

namespace detail {

inline IntMatrix negacyclic_shift(int side) {
  IntMatrix a = IntMatrix::Zero(side, side);
  for (int i = 1; i < side; ++i) a(i, i - 1) = 1;
  a(0, side - 1) = -1;
  return a;
}

inline IntMatrix kron(const IntMatrix& a, const IntMatrix& b) {
  IntMatrix out = IntMatrix::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace detail

/// Exact integer matrix power by repeated squaring.
inline IntMatrix int_matrix_power(const IntMatrix& m, unsigned k) {
  IntMatrix result = IntMatrix::Identity(m.rows(), m.cols());
  IntMatrix base = m;
  while (k != 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k != 0) base = base * base;
  }
  return result;
}

inline ComplexMatrix c_matrix(int s) {
  const int side = detail::side_of(s);
  const double scale = std::pow(2.0, -0.5 * s);
  ComplexMatrix c(side, side);
  for (int p = 0; p < side; ++p) {
    for (int q = 0; q < side; ++q) {
      // (-1)^p e^{-pi i p (2q+1) / 2^s} = e^{2 pi i (p 2^s - p (2q+1)) / 2^{s+1}}
      const std::int64_t turns = static_cast<std::int64_t>(p) * side - static_cast<std::int64_t>(p) * (2 * q + 1);
      c(p, q) = scale * root_of_unity(turns, s + 1);
    }
  }
  return c;
}

inline MatrixBundle build_matrices(int s) {
  const int side = detail::side_of(s);
  MatrixBundle b;
  b.s = s;
  b.negacyclic = detail::negacyclic_shift(side);
  const IntMatrix identity = IntMatrix::Identity(side, side);
  b.lambda = detail::kron(identity, b.negacyclic);
  b.omega = detail::kron(b.negacyclic, identity);
  b.c = c_matrix(s);
  return b;
}

/// max |M M* - I|
inline double unitarity_deviation(const ComplexMatrix& m) {
  const ComplexMatrix g = m * m.adjoint();
  return (g - ComplexMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

/// Row N = 2^s l + k is Omega^l Lambda^k alpha.
inline ComplexMatrix build_D(const AlphaGrid& alpha, const MatrixBundle& bundle) {
  if (alpha.s() != bundle.s) throw std::invalid_argument("build_D: alpha and bundle disagree on s");
  const int side = alpha.side();
  const ComplexMatrix lambda = bundle.lambda.cast<Complex>();
  const ComplexMatrix omega = bundle.omega.cast<Complex>();
  ComplexMatrix d(side * side, side * side);
  ComplexVector row_start = alpha.vector();
  for (int l = 0; l < side; ++l) {
    ComplexVector v = row_start;
    for (int k = 0; k < side; ++k) {
      d.row(side * l + k) = v.transpose();
      v = lambda * v;
    }
    row_start = omega * row_start;
  }
  return d;
}

/// D built from alpha_0, exactly over {-1, 0, 1}.
inline IntMatrix build_D0(const MatrixBundle& bundle) {
  const int side = 1 << bundle.s;
  IntMatrix d = IntMatrix::Zero(side * side, side * side);
  Eigen::VectorXi row_start = Eigen::VectorXi::Zero(side * side);
  row_start(0) = 1;
  for (int l = 0; l < side; ++l) {
    Eigen::VectorXi v = row_start;
    for (int k = 0; k < side; ++k) {
      d.row(side * l + k) = v.transpose();
      v = bundle.lambda * v;
    }
    row_start = bundle.omega * row_start;
  }
  return d;
}

/// Closed-form coefficients, both branches exactly as printed:
///   l = 0:  2^{-2s} (-1)^k e^{-pi i k / 2^s} sum_{p,q} e^{-2 pi i qk / 2^s} gamma_qp
///   l != 0: 2^{-2s} (-1)^{k-l+1} e^{-pi i (k-l) / 2^s} sum_{p,q} e^{-2 pi i (qk - lp) / 2^s} gamma_qp
/// Linear in gamma; no modulus check is applied here.
inline AlphaGrid closed_form_alpha(int s, const ComplexMatrix& gamma) {
  const int side = detail::side_of(s);
  const std::int64_t n = side;
  const double scale = std::ldexp(1.0, -2 * s);
  ComplexMatrix kl(side, side);
  for (std::int64_t k = 0; k < n; ++k) {
    for (std::int64_t l = 0; l < n; ++l) {
      Complex sum{};
      for (std::int64_t p = 0; p < n; ++p) {
        for (std::int64_t q = 0; q < n; ++q) sum += root_of_unity(-(q * k - l * p), s) * gamma(q, p);
      }
      // Prefactor as a 2^{s+1}-th root of unity: (-1)^x e^{-pi i y / 2^s} = e^{2 pi i (x 2^s - y) / 2^{s+1}}.
      const std::int64_t sign_turns = (l == 0 ? k : k - l + 1) * n;
      const std::int64_t phase_turns = l == 0 ? k : k - l;
      kl(k, l) = scale * root_of_unity(sign_turns - phase_turns, s + 1) * sum;
    }
  }
  return AlphaGrid::from_entries(s, kl);
}

inline AlphaGrid alpha_from_gamma(const GammaGrid& gamma) { return closed_form_alpha(gamma.s(), gamma.entries()); }

/// The commutant element B with alpha = B alpha_0 and the data it is assembled from.
struct CommutantFactorization {
  int s = 0;
  ComplexMatrix lambdas;              // lambdas(l, nu): l-th diagonal entry of beta~_nu
  std::vector<ComplexVector> thetas;  // theta_l = (lambda_l^(0), ..., lambda_l^(2^s-1))
  std::vector<ComplexVector> deltas;  // delta_nu = beta~_nu C^{-1} e_1
  ComplexVector e1;
  std::vector<ComplexMatrix> betas;   // beta_nu = C beta~_nu C^{-1}
  ComplexMatrix b;                    // block (i, j): beta_{j-i}, or -beta_{2^s+j-i} below the diagonal
};

/// lambda_l^(nu) = 2^{-s} (-1)^nu e^{-pi i nu / 2^s} sum_k e^{-2 pi i k nu / 2^s} gamma_lk
inline CommutantFactorization factorize_commutant(int s, const ComplexMatrix& gamma, const MatrixBundle& bundle) {
  const int side = detail::side_of(s);
  const std::int64_t n = side;
  CommutantFactorization f;
  f.s = s;
  f.lambdas.resize(side, side);
  const double scale = std::ldexp(1.0, -s);
  for (std::int64_t l = 0; l < n; ++l) {
    for (std::int64_t nu = 0; nu < n; ++nu) {
      Complex sum{};
      for (std::int64_t k = 0; k < n; ++k) sum += root_of_unity(-k * nu, s) * gamma(l, k);
      f.lambdas(l, nu) = scale * root_of_unity(nu * n - nu, s + 1) * sum;
    }
  }
  for (int l = 0; l < side; ++l) f.thetas.push_back(f.lambdas.row(l).transpose());

  f.e1 = ComplexVector::Zero(side);
  f.e1(0) = 1.0;
  const ComplexMatrix c_inv = bundle.c.adjoint();
  const ComplexVector c_inv_e1 = c_inv * f.e1;
  for (int nu = 0; nu < side; ++nu) {
    const ComplexMatrix beta_tilde = f.lambdas.col(nu).asDiagonal();
    f.deltas.push_back(beta_tilde * c_inv_e1);
    f.betas.push_back(bundle.c * beta_tilde * c_inv);
  }

  f.b = ComplexMatrix::Zero(side * side, side * side);
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      f.b.block(i * side, j * side, side, side) = j >= i ? f.betas[j - i] : ComplexMatrix(-f.betas[side + j - i]);
    }
  }
  return f;
}

/// alpha = blockdiag(C, ..., C) (delta_0, -delta_{2^s-1}, ..., -delta_1).
inline AlphaGrid alpha_from_factorization(const CommutantFactorization& f, const MatrixBundle& bundle) {
  const int side = 1 << f.s;
  ComplexVector alpha(side * side);
  for (int l = 0; l < side; ++l) {
    const ComplexVector stacked = l == 0 ? f.deltas[0] : ComplexVector(-f.deltas[side - l]);
    alpha.segment(l * side, side) = bundle.c * stacked;
  }
  return AlphaGrid(f.s, std::move(alpha));
}

inline AlphaGrid matrix_path_alpha(int s, const ComplexMatrix& gamma) {
  const MatrixBundle bundle = build_matrices(s);
  return alpha_from_factorization(factorize_commutant(s, gamma, bundle), bundle);
}

inline AlphaGrid alpha_via_matrix_path(const GammaGrid& gamma) { return matrix_path_alpha(gamma.s(), gamma.entries()); }

enum class AlphaPath { ClosedForm, MatrixPath, None };

inline std::string to_string(AlphaPath p) {
  switch (p) {
    case AlphaPath::ClosedForm: return "closed_form";
    case AlphaPath::MatrixPath: return "matrix_path";
    case AlphaPath::None: return "none";
  }
  return "none";
}

/// Agreement check between the two gamma -> alpha routes.
struct DualPathReport {
  int s = 0;
  double tolerance = 1e-10;
  AlphaGrid closed_form = AlphaGrid::unit(1);
  AlphaGrid matrix_path = AlphaGrid::unit(1);
  double max_entry_difference = 0.0;
  bool agree = false;
  double closed_form_unitarity = 0.0;  // max |D D* - I|
  double matrix_path_unitarity = 0.0;
  AlphaPath trusted = AlphaPath::None;
  AlphaGrid resolved = AlphaGrid::unit(1);

  /// Agreement, or a discrepancy with an identified unitary route.
  bool pass() const { return trusted != AlphaPath::None; }
};

inline DualPathReport compare_alpha_paths(const GammaGrid& gamma, double tolerance = 1e-10) {
  const MatrixBundle bundle = build_matrices(gamma.s());
  DualPathReport r;
  r.s = gamma.s();
  r.tolerance = tolerance;
  r.closed_form = alpha_from_gamma(gamma);
  r.matrix_path = alpha_from_factorization(factorize_commutant(gamma.s(), gamma.entries(), bundle), bundle);
  r.max_entry_difference = (r.closed_form.vector() - r.matrix_path.vector()).cwiseAbs().maxCoeff();
  r.agree = r.max_entry_difference <= tolerance;
  r.closed_form_unitarity = unitarity_deviation(build_D(r.closed_form, bundle));
  r.matrix_path_unitarity = unitarity_deviation(build_D(r.matrix_path, bundle));
  // Orthonormality decides: prefer the route whose D is unitary.
  if (r.matrix_path_unitarity <= tolerance) {
    r.trusted = AlphaPath::MatrixPath;
    r.resolved = r.matrix_path;
  } else if (r.closed_form_unitarity <= tolerance) {
    r.trusted = AlphaPath::ClosedForm;
    r.resolved = r.closed_form;
  } else {
    r.trusted = AlphaPath::None;
    r.resolved = r.matrix_path;
  }
  return r;
}

/// sum_{k,l} alpha_kl psi(. - (k/2^s, l/2^s)); parameters (1, s).
inline StepFunction2D synthesize_wavelet(const AlphaGrid& alpha) {
  const StepFunction2D psi = make_psi();
  const auto shifts = enumerate_shifts(alpha.s());
  LinearCombination<2> acc;
  for (std::size_t idx = 0; idx < shifts.size(); ++idx) {
    acc.add(alpha.vector()(static_cast<Eigen::Index>(idx)), translate(psi, shifts[idx]));
  }
  return acc.build();
}

/// Deterministic unit-modulus grid with uniform phases. The phase is taken
/// from the top 53 bits of mt19937_64, so grids are identical across platforms.
inline GammaGrid random_gamma(int s, std::uint64_t seed) {
  const int side = detail::side_of(s);
  std::mt19937_64 engine(seed);
  ComplexMatrix g(side, side);
  for (int q = 0; q < side; ++q) {
    for (int p = 0; p < side; ++p) {
      const double u = std::ldexp(static_cast<double>(engine() >> 11), -53);
      const double angle = 2.0 * std::numbers::pi * u;
      g(q, p) = Complex(std::cos(angle), std::sin(angle));
    }
  }
  // cos/sin round to within an ulp of the unit circle; renormalize anyway.
  for (int q = 0; q < side; ++q) {
    for (int p = 0; p < side; ++p) g(q, p) /= std::abs(g(q, p));
  }
  return GammaGrid(s, std::move(g));
}

/// <f, psi(. - a_M)> for every M = 2^s l + k.
inline ComplexVector psi_shift_coefficients(const StepFunction2D& f, int s) {
  const StepFunction2D psi = make_psi();
  const auto shifts = enumerate_shifts(s);
  ComplexVector out(static_cast<Eigen::Index>(shifts.size()));
  for (std::size_t i = 0; i < shifts.size(); ++i) out(static_cast<Eigen::Index>(i)) = inner_product(f, translate(psi, shifts[i]));
  return out;
}

/// Gram matrix <f_i, f_j>.
inline ComplexMatrix gram_matrix(const std::vector<StepFunction2D>& family) {
  const auto n = static_cast<Eigen::Index>(family.size());
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = inner_product(family[static_cast<std::size_t>(i)], family[static_cast<std::size_t>(j)]);
      g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

struct WaveletCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper_bound = true;  // pass iff value < threshold (else value > threshold)
  bool pass = false;
};

struct WaveletReport {
  int s = 0;
  double tolerance = 1e-10;
  std::vector<WaveletCheck> checks;
  ComplexMatrix gram;            // translates of psi~ over enumerate_shifts(s)
  std::size_t completeness_rank = 0;
  std::size_t v1_slice_dimension = 0;

  bool pass() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
  }

  std::vector<std::string> failing_checks() const {
    std::vector<std::string> names;
    for (const auto& c : checks) {
      if (!c.pass) names.push_back(c.name);
    }
    return names;
  }

  const WaveletCheck* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

inline constexpr double kCompletenessEigenvalueFloor = 1e-6;
inline constexpr std::size_t kFarShiftSamples = 20;

/// Shifts a in I_2^2 with |a|_2 > 2^s, drawn deterministically.
inline std::vector<DyadicVec2> far_shift_samples(int s, std::size_t count, std::uint64_t seed = 0x5eed) {
  std::mt19937_64 engine(seed);
  std::vector<DyadicVec2> out;
  while (out.size() < count) {
    const int e = s + 1 + static_cast<int>(engine() % 3);
    const std::uint64_t side = std::uint64_t{1} << e;
    const auto k = static_cast<std::int64_t>(engine() % side);
    const auto l = static_cast<std::int64_t>(engine() % side);
    DyadicVec2 a{DyadicRational::of(k, e), DyadicRational::of(l, e)};
    if (norm2(a) > DyadicRational(BigInt(1), -s)) out.push_back(std::move(a));
  }
  return out;
}

/// Orthonormality, orthogonality to V_0, completeness in V_1 and the support
/// law for a candidate wavelet supported in B_s. Never throws on bad candidates.
inline WaveletReport verify_wavelet(const StepFunction2D& candidate, int s, double tolerance = 1e-10) {
  WaveletReport report;
  report.s = s;
  report.tolerance = tolerance;
  const auto upper = [&](std::string name, double value, double threshold) {
    report.checks.push_back({std::move(name), value, threshold, true, value < threshold});
  };

  const StepFunction2D f = canonicalize(candidate);
  const bool supported = f.is_zero() || f.support_exp() <= s;
  upper("support", supported ? 0.0 : static_cast<double>(f.support_exp() - s), 0.5);
  if (!supported || s < 1) return report;

  const auto shifts = enumerate_shifts(s);
  const StepFunction2D phi = make_phi();
  std::vector<StepFunction2D> wavelet_shifts;
  std::vector<StepFunction2D> phi_shifts;
  for (const auto& a : shifts) {
    wavelet_shifts.push_back(translate(f, a));
    phi_shifts.push_back(translate(phi, a));
  }

  report.gram = gram_matrix(wavelet_shifts);
  const auto n = report.gram.rows();
  const double gram_dev = (report.gram - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  upper("orthonormality", gram_dev, tolerance);

  double phi_overlap = 0.0;
  for (const auto& g : phi_shifts) phi_overlap = std::max(phi_overlap, std::abs(inner_product(f, g)));
  upper("orthogonal_to_V0", phi_overlap, tolerance);

  std::vector<StepFunction2D> family = phi_shifts;
  family.insert(family.end(), wavelet_shifts.begin(), wavelet_shifts.end());
  const ComplexMatrix joint = gram_matrix(family);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(joint, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  report.completeness_rank = static_cast<std::size_t>(
      (eig.eigenvalues().array() > kCompletenessEigenvalueFloor).count());
  const auto v1 = space_slice(SpaceTag::QuincunxV, 1, s);
  report.v1_slice_dimension = v1.basis.size();
  report.checks.push_back({"completeness_min_eigenvalue", smallest, kCompletenessEigenvalueFloor, false,
                           smallest > kCompletenessEigenvalueFloor && family.size() == v1.basis.size()});
  upper("in_V1_slice", max_projection_residual(family, v1.basis).max_residual, tolerance);

  const StepFunction2D psi = make_psi();
  double far = 0.0;
  for (const auto& a : far_shift_samples(s, kFarShiftSamples)) {
    far = std::max(far, std::abs(inner_product(f, translate(psi, a))));
  }
  upper("far_shift_orthogonality", far, tolerance);
  return report;
}

}  // namespace qhaar

#endif  // QHAAR_WAVELETGEN_HPP_
