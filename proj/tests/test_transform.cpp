#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qhaar/transform.hpp"

using namespace qhaar;

namespace {

const WaveletBasis& standard_basis() {
  static const WaveletBasis basis = WaveletBasis::standard();
  return basis;
}

const WaveletBasis& random_basis() {
  static const WaveletBasis basis(compare_alpha_paths(random_gamma(2, 2024)).resolved);
  return basis;
}

double max_coefficient(const CoefficientSet& c, const std::pair<int, DyadicVec2>* skip = nullptr) {
  double worst = 0.0;
  for (const auto& [key, v] : c.wavelet) {
    if (skip != nullptr && key == *skip) continue;
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace

TEST(Transform, AnalyzeWaveletAgainstItself) {
  for (const WaveletBasis* basis : {&standard_basis(), &random_basis()}) {
    const auto c = analyze(basis->function(), *basis, 0);
    const std::pair<int, DyadicVec2> origin{0, DyadicVec2{}};
    ASSERT_TRUE(c.wavelet.contains(origin));
    EXPECT_NEAR(std::abs(c.wavelet.at(origin) - Complex(1.0)), 0.0, 1e-12);
    EXPECT_LT(max_coefficient(c, &origin), 1e-12);
    for (const auto& [a, v] : c.scaling) EXPECT_LT(std::abs(v), 1e-12);
  }
}

TEST(Transform, AnalyzeScalingFunction) {
  for (const WaveletBasis* basis : {&standard_basis(), &random_basis()}) {
    const auto c = analyze(make_phi(), *basis, 0);
    EXPECT_EQ(c.j_max, 0);
    EXPECT_TRUE(c.wavelet.empty());
    ASSERT_EQ(c.scaling.size(), 1U);
    EXPECT_LT(std::abs(c.scaling.at(DyadicVec2{}) - Complex(1.0)), 1e-15);
  }
}

TEST(Transform, RejectsJMinAboveJMax) {
  EXPECT_THROW(analyze(make_psi(), WaveletBasis::standard(), 3), std::invalid_argument);
  EXPECT_NO_THROW(analyze(make_psi(), WaveletBasis::standard(), 2));
}

TEST(Transform, CoefficientsMatchExplicitBasisFunctions) {
  std::mt19937_64 rng(50);
  const auto f = oracle::random_step_function(rng, 2, 1);
  for (const WaveletBasis* basis : {&standard_basis(), &random_basis()}) {
    const auto c = analyze(f, *basis, -1);
    for (const auto& [key, v] : c.wavelet) {
      const auto g = basis_function(basis->function(), key.first, key.second);
      EXPECT_LT(std::abs(v - inner_product(f, g)), 1e-12);
    }
    for (const auto& [a, v] : c.scaling) {
      EXPECT_LT(std::abs(v - inner_product(f, basis_function(make_phi(), -1, a))), 1e-12);
    }
  }
}

TEST(Transform, EmptySetSynthesizesZero) {
  CoefficientSet c;
  c.alpha_digest = WaveletBasis::standard().digest();
  EXPECT_TRUE(synthesize(c, WaveletBasis::standard()).is_zero());
}

TEST(Transform, SingleUnitCoefficient) {
  const auto& basis = random_basis();
  CoefficientSet c;
  c.s = basis.s();
  c.alpha_digest = basis.digest();
  c.j_max = 1;
  c.wavelet.emplace(std::make_pair(0, DyadicVec2{}), 1.0);
  EXPECT_LT(max_abs_difference(synthesize(c, basis), basis.function()), 1e-15);
}

TEST(Transform, SynthesizeRejectsForeignCoefficients) {
  const auto c = analyze(make_psi(), WaveletBasis::standard(), 0);
  EXPECT_THROW(synthesize(c, random_basis()), std::invalid_argument);
}

TEST(Transform, ParsevalExamples) {
  const auto& basis = random_basis();
  const auto self = parseval_check(basis.function(), basis, 0);
  EXPECT_NEAR(self.function_norm_sq, 1.0, 1e-12);
  EXPECT_LT(self.difference, 1e-12);

  const auto sum = parseval_check(make_phi() + make_psi(), WaveletBasis::standard(), 0);
  EXPECT_NEAR(sum.function_norm_sq, 2.0, 1e-12);
  EXPECT_LT(sum.difference, 1e-12);
  EXPECT_TRUE(sum.pass);
}

TEST(Transform, RoundTripRandomFunctions) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 6; ++trial) {
    const auto f = oracle::random_step_function(rng, 2, 1);
    for (const WaveletBasis* basis : {&standard_basis(), &random_basis()}) {
      const auto c = analyze(f, *basis, -2);
      EXPECT_NEAR(c.squared_sum(), squared_norm(f), 1e-10);
      EXPECT_LT(norm(synthesize(c, *basis) - f), 1e-10);
    }
  }
}

TEST(Transform, DefaultJMin) {
  std::mt19937_64 rng(52);
  const auto f = canonicalize(oracle::random_step_function(rng, 2, 2, 1.0));
  EXPECT_EQ(default_j_min(f), -2 * f.support_exp());
  const auto c = analyze(f, WaveletBasis::standard());
  EXPECT_EQ(c.j_min, -2 * f.support_exp());
  EXPECT_LT(norm(synthesize(c, WaveletBasis::standard()) - f), 1e-10);
}

// --- properties -------------------------------------------------------------

TEST(TransformProperties, Normalization) {
  for (const WaveletBasis* basis : {&standard_basis(), &random_basis()}) {
    for (int j = -3; j <= 3; ++j) {
      EXPECT_NEAR(norm(basis_function(basis->function(), j, DyadicVec2{})), 1.0, 1e-12) << "j=" << j;
    }
  }
}

TEST(TransformProperties, LevelOrthogonality) {
  const auto& basis = random_basis();
  for (int j = -1; j <= 1; ++j) {
    const auto g = basis_function(basis.function(), j, DyadicVec2{DyadicRational::of(1, 2), DyadicRational(0)});
    const auto c = analyze(g, basis, -2);
    for (const auto& [key, v] : c.wavelet) {
      if (key.first != j) {
        EXPECT_LT(std::abs(v), 1e-10) << "level " << key.first << " vs " << j;
      }
    }
    for (const auto& [a, v] : c.scaling) EXPECT_LT(std::abs(v), 1e-10);
  }
}

TEST(TransformProperties, Linearity) {
  std::mt19937_64 rng(53);
  const auto f = oracle::random_step_function(rng, 2, 1);
  const auto g = oracle::random_step_function(rng, 2, 1);
  const Complex a(0.5, -1.5);
  const Complex b(2.0, 0.25);
  const auto& basis = random_basis();
  const auto cf = analyze(f, basis, -2);
  const auto cg = analyze(g, basis, -2);
  const auto ch = analyze(lincomb<2>({{a, f}, {b, g}}), basis, -2);
  const auto get = [](const CoefficientSet& c, const std::pair<int, DyadicVec2>& key) {
    auto it = c.wavelet.find(key);
    return it == c.wavelet.end() ? Complex{} : it->second;
  };
  for (const auto& [key, v] : ch.wavelet) {
    // f sits in the first slot, so coefficients are linear (not conjugate-linear) in f.
    EXPECT_LT(std::abs(v - (a * get(cf, key) + b * get(cg, key))), 1e-12);
  }
}

TEST(TransformProperties, RepresentationIndependence) {
  std::mt19937_64 rng(54);
  const auto f = canonicalize(oracle::random_step_function(rng, 2, 1));
  const auto fine = refine(f, f.scale() + 1, f.support_exp() + 1);
  const auto& basis = random_basis();
  const auto c1 = analyze(f, basis, -2);
  const auto c2 = analyze(fine, basis, -2);
  EXPECT_EQ(c1.j_max, c2.j_max);
  ASSERT_EQ(c1.wavelet.size(), c2.wavelet.size());
  for (const auto& [key, v] : c1.wavelet) EXPECT_LT(std::abs(v - c2.wavelet.at(key)), 1e-12);
}

TEST(Digest, StableAndDiscriminating) {
  EXPECT_EQ(alpha_digest(AlphaGrid::unit(1)), alpha_digest(AlphaGrid::unit(1)));
  EXPECT_NE(alpha_digest(AlphaGrid::unit(1)), alpha_digest(AlphaGrid::unit(2)));
  EXPECT_EQ(alpha_digest(AlphaGrid::unit(1)).size(), 16U);
  EXPECT_NE(gamma_digest(random_gamma(2, 1)), gamma_digest(random_gamma(2, 2)));
}
