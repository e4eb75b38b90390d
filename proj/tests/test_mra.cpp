#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qhaar/mra.hpp"

using namespace qhaar;

namespace {

DyadicRational dy(std::int64_t k, std::int64_t e) { return DyadicRational::of(k, e); }
DyadicVec2 pt(std::int64_t a, std::int64_t b, std::int64_t e = 0) { return {dy(a, e), dy(b, e)}; }

}  // namespace

TEST(ScalingFunction, Basics) {
  const auto phi = make_phi();
  EXPECT_EQ(phi(DyadicVec2{}), Complex(1.0));
  EXPECT_DOUBLE_EQ(norm(phi), 1.0);
}

TEST(ScalingFunction, RefinementIdentity) {
  const auto phi = make_phi();
  const auto rhs = dilate(phi, QuincunxMatrix::A()) +
                   translate(dilate(phi, QuincunxMatrix::A()), apply_matrix(QuincunxMatrix::A_inverse(), pt(1, 1, 1)));
  EXPECT_EQ(rhs, phi);
  // The same identity pointwise: phi(Ax) + phi(Ax - (1/2, 1/2)).
  std::mt19937_64 rng(30);
  for (int i = 0; i < 500; ++i) {
    const auto x = oracle::random_point(rng, 3);
    const auto ax = apply_matrix(QuincunxMatrix::A(), x);
    const double expected = (oracle::in_z2(ax) ? 1.0 : 0.0) + (oracle::in_z2(ax - pt(1, 1, 1)) ? 1.0 : 0.0);
    EXPECT_EQ(phi(x).real(), expected);
  }
}

TEST(Wavelet, MatchesPointwiseDefinition) {
  const auto psi = make_psi();
  EXPECT_EQ(psi.scale(), 1);
  EXPECT_EQ(psi.support_exp(), 0);
  EXPECT_EQ(psi(DyadicVec2{}), Complex(1.0));
  EXPECT_EQ(psi(pt(1, 0)), Complex(-1.0));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    const auto x = oracle::random_point(rng, 3);
    EXPECT_EQ(psi(x), Complex(oracle::psi_at(x))) << x.to_string();
  }
}

TEST(Wavelet, OrthogonalToScalingTranslates) {
  const auto psi = make_psi();
  for (const auto& a : enumerate_shifts(2)) {
    EXPECT_EQ(inner_product(psi, translate(make_phi(), a)), Complex{});
  }
}

TEST(Univariate, HaarWavelet) {
  const auto psi = univariate_haar_wavelet();
  EXPECT_EQ(psi(DyadicRational(0)), Complex(1.0));
  EXPECT_LT(std::abs(psi(DyadicRational(1)) - Complex(-1.0)), 1e-15);
  EXPECT_DOUBLE_EQ(norm(psi), 1.0);
  EXPECT_EQ(psi(dy(1, 1)), Complex{});
}

TEST(Separable, Wavelets) {
  const auto [w1, w2, w3] = separable_wavelets();
  const std::vector<StepFunction2D> w{w1, w2, w3};
  EXPECT_LT(std::abs(w3(DyadicVec2{}) - Complex(1.0)), 1e-15);
  const auto big_phi = separable_scaling_function();
  EXPECT_EQ(big_phi, make_phi());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_LT(std::abs(inner_product(w[i], w[j]) - Complex(i == j ? 1.0 : 0.0)), 1e-15);
    }
    EXPECT_LT(std::abs(inner_product(w[i], big_phi)), 1e-15);
  }
}

TEST(IntegerShiftSign, Examples) {
  EXPECT_EQ(integer_shift_sign(pt(0, 0)), 1);
  EXPECT_EQ(integer_shift_sign(pt(1, 1)), 1);
  EXPECT_EQ(integer_shift_sign(pt(1, 0)), -1);
  EXPECT_THROW(integer_shift_sign(pt(1, 0, 1)), std::invalid_argument);
}

TEST(IntegerShiftSign, ExhaustiveOnSmallBox) {
  const auto psi = make_psi();
  for (std::int64_t n1 = -8; n1 <= 8; ++n1) {
    for (std::int64_t n2 = -8; n2 <= 8; ++n2) {
      const DyadicVec2 n = pt(n1, n2);
      const int sign = integer_shift_sign(n);
      EXPECT_EQ(sign, oracle::parity_sign(n1, n2));
      const auto shifted = canonicalize(translate(psi, -n));
      const auto expected = canonicalize(Complex(sign) * psi);
      EXPECT_EQ(shifted.scale(), expected.scale());
      EXPECT_EQ(shifted.support_exp(), expected.support_exp());
      EXPECT_EQ(shifted.cells(), expected.cells());
    }
  }
}

TEST(SpaceSlice, Counts) {
  const auto v00 = space_slice(SpaceTag::QuincunxV, 0, 0);
  ASSERT_EQ(v00.basis.size(), 1U);
  EXPECT_EQ(v00.basis[0], make_phi());
  const auto w00 = space_slice(SpaceTag::QuincunxW, 0, 0);
  ASSERT_EQ(w00.basis.size(), 1U);
  EXPECT_EQ(w00.basis[0], make_psi());
  for (int t = 0; t <= 2; ++t) {
    for (int j = -2 * t; j <= 2; ++j) {
      EXPECT_EQ(space_slice(SpaceTag::QuincunxV, j, t).basis.size(), std::size_t{1} << (j + 2 * t))
          << "j=" << j << " t=" << t;
    }
  }
  EXPECT_TRUE(space_slice(SpaceTag::QuincunxV, -3, 1).basis.empty());
}

TEST(SpaceSlice, OrthonormalAndSupported) {
  for (auto tag : {SpaceTag::QuincunxV, SpaceTag::QuincunxW, SpaceTag::SeparableV, SpaceTag::SeparableW}) {
    for (int j = -1; j <= 2; ++j) {
      const auto slice = space_slice(tag, j, 1);
      EXPECT_LT(gram_deviation(slice.basis), 1e-10) << to_string(tag) << " j=" << j;
      for (const auto& g : slice.basis) EXPECT_LE(canonicalize(g).support_exp(), 1);
    }
  }
}

TEST(SpaceSlice, Nesting) {
  for (int j = -1; j <= 1; ++j) {
    const auto coarse = space_slice(SpaceTag::QuincunxV, j, 1);
    const auto fine = space_slice(SpaceTag::QuincunxV, j + 1, 2);
    EXPECT_LT(max_projection_residual(coarse.basis, fine.basis).max_residual, 1e-10) << "j=" << j;
  }
}

TEST(SpaceSlice, DilationAxiom) {
  for (int j = -1; j <= 1; ++j) {
    const auto slice = space_slice(SpaceTag::QuincunxV, j, 1);
    const auto next = space_slice(SpaceTag::QuincunxV, j + 1, 1);
    std::vector<StepFunction2D> dilated;
    for (const auto& g : slice.basis) dilated.push_back(dilate(g, QuincunxMatrix::A()));
    EXPECT_LT(max_projection_residual(dilated, next.basis).max_residual, 1e-10) << "j=" << j;
  }
}

TEST(SpaceSlice, WaveletLevelsOrthogonalToScaling) {
  const auto v0 = space_slice(SpaceTag::QuincunxV, 0, 2);
  for (int j = 0; j <= 2; ++j) {
    for (const auto& w : space_slice(SpaceTag::QuincunxW, j, 2).basis) {
      for (const auto& v : v0.basis) EXPECT_LT(std::abs(inner_product(w, v)), 1e-12);
    }
  }
}

TEST(SquareRoot, DegenerateSlice) {
  const auto r = verify_square_root(0);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.wavelet_spaces_checked);
  EXPECT_EQ(r.dims.at("separable_V0"), 1U);
  EXPECT_EQ(r.dims.at("quincunx_V0"), 1U);
  EXPECT_EQ(r.max_residual, 0.0);
}

TEST(SquareRoot, Slices) {
  for (int t : {1, 2}) {
    const auto r = verify_square_root(t);
    EXPECT_TRUE(r.pass) << r.failed_check;
    EXPECT_LT(r.max_residual, 1e-10);
    EXPECT_EQ(r.dims.at("separable_W0"), r.dims.at("quincunx_W0") + r.dims.at("quincunx_W1"));
    EXPECT_EQ(r.dims.at("separable_V0"), r.dims.at("quincunx_V0"));
    EXPECT_EQ(r.dims.at("separable_V0"), std::size_t{1} << (2 * t));
  }
  EXPECT_THROW(verify_square_root(-1), std::invalid_argument);
}

TEST(SquareRoot, ReportsFailure) {
  // A slice paired against the wrong family leaves a residual.
  const auto w0 = space_slice(SpaceTag::QuincunxW, 0, 1);
  const auto v0 = space_slice(SpaceTag::QuincunxV, 0, 1);
  const auto r = max_projection_residual(w0.basis, v0.basis);
  EXPECT_NEAR(r.max_residual, 1.0, 1e-12);
}
