#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opcalc/matop.hpp"

using namespace opcalc;

namespace {

double max_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat m2(cplx a, cplx b, cplx c, cplx d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

std::vector<MatrixOperator> seeded_operators() {
  std::vector<MatrixOperator> ops;
  for (int s = 0; s < 4; ++s) ops.push_back(random_sectorial(2 + 2 * s, 1.0, 100 + s));
  for (int s = 0; s < 3; ++s) ops.push_back(random_hilbert_contraction_gen(3 + s, 200 + s));
  return ops;
}

}  // namespace

TEST(MatrixOperator, FlagsAndSpectralCache) {
  EXPECT_TRUE(diag_operator({1.0, 2.0}).diagonalizable());
  EXPECT_TRUE(diag_operator({1.0, 2.0}).normal());
  EXPECT_FALSE(jordan_block(1.0, 2).diagonalizable());
  EXPECT_THROW(jordan_block(1.0, 3).spectral(), NotDiagonalizable);
  for (const auto& A : seeded_operators()) {
    ASSERT_TRUE(A.diagonalizable());
    const auto& c = A.spectral();
    const Mat rec = c.P * c.eigenvalues.asDiagonal() * c.P_inv;
    EXPECT_LE(max_diff(rec, A.entries()), 1e-10 * A.max_abs());
  }
  EXPECT_THROW(MatrixOperator(Mat(2, 3)), DomainError);
}

TEST(Resolvent, Examples) {
  const auto A = diag_operator({1.0, 2.0});
  EXPECT_LE(max_diff(resolvent(A, 1.0), diag_operator({0.5, 1.0 / 3.0}).entries()), 1e-15);
  const Mat r = resolvent(A, 1.0);
  EXPECT_LE(max_diff(resolvent_power(A, 1.0, 2.0), r * r), 1e-15);
  // Inverse of [[2,1],[0,2]].
  EXPECT_LE(max_diff(resolvent(jordan_block(1.0, 2), 1.0), m2(0.5, -0.25, 0.0, 0.5)), 1e-15);
  EXPECT_THROW(resolvent(A, -1.0), Singular);
  EXPECT_THROW(resolvent_power(jordan_block(1.0, 2), 1.0, 0.5), NotDiagonalizable);
}

TEST(Resolvent, FractionalPowerSquaresToInteger) {
  for (const auto& A : seeded_operators()) {
    const cplx z(0.7, -1.3);
    const Mat h = resolvent_power(A, z, 0.5);
    EXPECT_LE(max_diff(h * h, resolvent(A, z)), 1e-10 * (1.0 + op_norm(resolvent(A, z))));
    const Mat p = resolvent_power(A, z, 1.5);
    EXPECT_LE(max_diff(p, h * resolvent(A, z)), 1e-10 * (1.0 + op_norm(p)));
  }
}

TEST(Resolvent, IdentityProperty) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(0.01, 3.0), im(-5.0, 5.0);
  for (const auto& A : seeded_operators()) {
    for (int k = 0; k < 10; ++k) {
      const cplx z(re(rng), im(rng)), w(re(rng), im(rng));
      const Mat rz = resolvent(A, z), rw = resolvent(A, w);
      const Mat lhs = rz - rw, rhs = (w - z) * rz * rw;
      EXPECT_LE(max_diff(lhs, rhs), 1e-10 * (1.0 + rz.cwiseAbs().maxCoeff() * rw.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Sectoriality, NormalPositiveSpectrum) {
  EXPECT_NEAR(sectoriality_constant(diag_operator({1.0, 2.0}), kPi / 2).value, 1.0, 1e-6);
  EXPECT_NEAR(sectoriality_constant(diag_operator({3.5}), kPi / 2).value, 1.0, 1e-6);
  EXPECT_NEAR(semigroup_bound(diag_operator({1.0, 2.0})).value, 1.0, 1e-6);
  // Scalar oracle on a narrower region: sup over |arg z| <= pi - psi of |z/(z+1)| = 1/sin(psi).
  for (double psi : {0.3, 0.8, 1.2}) {
    const double expect = 1.0 / std::sin(psi);
    EXPECT_NEAR(sectoriality_constant(diag_operator({1.0}), psi).value, expect, 1e-6 * expect) << psi;
  }
}

TEST(Sectoriality, GridDoublingInvariance) {
  const MatrixOperator A(m2(1.0, 10.0, 0.0, 1.0));
  quad::QuadConfig c1, c2;
  c2.sup_seeds = 2 * c1.sup_seeds;
  const double v1 = sectoriality_constant(A, kPi / 2, c1).value;
  const double v2 = sectoriality_constant(A, kPi / 2, c2).value;
  EXPECT_GT(v1, 1.0);
  EXPECT_NEAR(v1, v2, 1e-4 * v2);
  // Dense brute-force oracle along the imaginary axis.
  double brute = 1.0;
  for (int k = -4000; k <= 4000; ++k) {
    const cplx z(0.0, std::pow(10.0, k / 500.0));
    brute = std::max(brute, op_norm(z * resolvent(A, z)));
  }
  EXPECT_GE(v1, brute * (1.0 - 1e-9));
  EXPECT_NEAR(v1, brute, 1e-4 * brute);
}

TEST(Sectoriality, UnboundedOutsideSector) {
  EXPECT_FALSE(sectoriality_constant(diag_operator({cplx(1.0, 2.0)}), 0.5).bounded);
  EXPECT_FALSE(semigroup_bound(diag_operator({-1.0})).bounded);
  EXPECT_FALSE(semigroup_bound(jordan_block(cplx(0.0, 1.0), 2)).bounded);
  EXPECT_TRUE(semigroup_bound(diag_operator({cplx(0.0, 1.0), 2.0})).bounded);
}

TEST(Gsf, ScalarClosedForm) {
  // (2/pi) alpha int d beta / ((alpha+a)^2 + beta^2) = 2 alpha/(alpha+a), increasing to 2.
  const auto b = gsf_bracket(diag_operator({1.0}));
  EXPECT_TRUE(b.satisfied());
  EXPECT_NEAR(b.upper, 2.0 * 1e6 / (1e6 + 1.0), 1e-6);
  EXPECT_NEAR(b.lower, b.upper, 1e-6);
}

TEST(Gsf, SelfAdjointBoundedByTwo) {
  const auto b = gsf_bracket(diag_operator({1.0, 2.0}));
  EXPECT_TRUE(b.satisfied());
  EXPECT_LE(b.lower, b.upper);
  EXPECT_LE(b.upper, 2.0 + 1e-6);
}

TEST(Gsf, SectorialBoundAndStability) {
  const double C = 8.0 * (2.0 + std::log(2.0));
  for (std::uint64_t seed : {1u, 2u}) {
    const auto A = random_sectorial(4, 1.2, seed);
    const double M = sectoriality_constant(A, kPi / 2).value;
    GsfOptions coarse, fine;
    coarse.pairs = fine.pairs = 50;
    fine.points_per_decade = 8;
    const auto b1 = gsf_bracket(A, {}, coarse);
    const auto b2 = gsf_bracket(A, {}, fine);
    EXPECT_LE(b1.lower, b1.upper);
    EXPECT_LE(b1.upper, C * M * (std::log(M) + 1.0) + 1e-6);
    EXPECT_NEAR(b1.upper, b2.upper, 0.05 * b2.upper);
    EXPECT_NEAR(b1.lower, b2.lower, 0.05 * b2.lower);
  }
}

TEST(Gsf, StructuralCheck) {
  EXPECT_TRUE(gsf_structural(diag_operator({0.0, cplx(0.0, 2.0), 1.0})));
  EXPECT_FALSE(gsf_structural(jordan_block(cplx(0.0, 1.0), 2)));
  EXPECT_TRUE(gsf_structural(jordan_block(1.0, 3)));
  EXPECT_FALSE(gsf_structural(diag_operator({-0.1})));
}

TEST(Semigroup, Examples) {
  const auto A = diag_operator({1.0, 2.0});
  EXPECT_LE(max_diff(semigroup(A, 0.0), Mat::Identity(2, 2)), 0.0);
  EXPECT_LE(max_diff(semigroup(A, 1.0), diag_operator({std::exp(-1.0), std::exp(-2.0)}).entries()), 1e-15);
  const Mat expect = std::exp(-1.0) * m2(1.0, -1.0, 0.0, 1.0);
  EXPECT_LE(max_diff(semigroup(jordan_block(1.0, 2), 1.0), expect), 1e-14);
  EXPECT_THROW(semigroup(A, -1.0), DomainError);
  EXPECT_THROW(semigroup(random_sectorial(3, 1.0, 5), cplx(1.0, 2.0)), DomainError);
}

TEST(Semigroup, LawProperty) {
  auto ops = seeded_operators();
  ops.push_back(jordan_block(0.5, 3));
  for (const auto& A : ops) {
    for (double s : {0.1, 1.0, 3.0}) {
      for (double t : {0.05, 2.0}) {
        const Mat lhs = semigroup(A, s) * semigroup(A, t);
        EXPECT_LE(max_diff(lhs, semigroup(A, s + t)), 1e-9);
      }
    }
    if (A.spectral_angle() < kPi / 2 - 0.2) {
      const cplx l1(1.0, 0.1), l2(0.5, -0.05);
      EXPECT_LE(max_diff(semigroup(A, l1) * semigroup(A, l2), semigroup(A, l1 + l2)), 1e-9);
    }
  }
}

TEST(FractionalPower, ExamplesAndLaw) {
  EXPECT_LE(max_diff(fractional_power(diag_operator({4.0, 9.0}), 0.5).entries(), diag_operator({2.0, 3.0}).entries()),
            1e-14);
  const auto p = fractional_power(diag_operator({1.0, 2.0}), 0.7);
  EXPECT_NEAR(std::abs(p.entries()(1, 1) - std::pow(2.0, 0.7)), 0.0, 1e-12);
  for (const auto& A : seeded_operators()) {
    for (auto [g1, g2] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {0.9, 0.8}, {0.25, 1.5}}) {
      const Mat lhs = fractional_power(A, g1).entries() * fractional_power(A, g2).entries();
      const Mat rhs = fractional_power(A, g1 + g2).entries();
      EXPECT_LE(max_diff(lhs, rhs), 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
  EXPECT_THROW(fractional_power(jordan_block(1.0, 2), 0.5), NotDiagonalizable);
  EXPECT_THROW(fractional_power(diag_operator({cplx(-1.0, 0.1)}), 1.2), BranchViolation);
}

TEST(Arccot, ExamplesAndBranch) {
  EXPECT_NEAR(std::abs(matrix_arccot(diag_operator({1.0}))(0, 0) - kPi / 4), 0.0, 1e-15);
  EXPECT_THROW(matrix_arccot(diag_operator({cplx(0.0, 1.0)})), BranchViolation);
  // arccot(x) = atan(1/x) on the positive axis.
  const Mat m = matrix_arccot(diag_operator({0.5, 3.0}));
  EXPECT_NEAR(m(0, 0).real(), std::atan(2.0), 1e-14);
  EXPECT_NEAR(m(1, 1).real(), std::atan(1.0 / 3.0), 1e-14);
}

TEST(SpectralApply, Examples) {
  const auto A = diag_operator({1.0, 2.0});
  EXPECT_LE(max_diff(spectral_apply(HolFunction::exp(1.0), A), semigroup(A, 1.0)), 1e-15);
  for (const auto& B : seeded_operators())
    EXPECT_LE(max_diff(spectral_apply(HolFunction::resolvent(1.0), B), resolvent(B, 1.0)), 1e-10);
  EXPECT_LE(max_diff(spectral_apply(HolFunction::cayley_power(1), diag_operator({1.0, 3.0})),
                     diag_operator({0.0, 0.5}).entries()),
            1e-15);
  // Boundary eigenvalue uses the continuous extension; outside the closure is rejected.
  EXPECT_NO_THROW(spectral_apply(HolFunction::exp(1.0), diag_operator({cplx(0.0, 2.0)})));
  EXPECT_THROW(spectral_apply(HolFunction::exp(1.0), diag_operator({-1.0})), DomainError);
}

TEST(MatrixJson, RoundTrip) {
  const auto A = random_sectorial(3, 0.5, 9);
  const Mat back = matrix_from_json(matrix_to_json(A.entries()));
  EXPECT_EQ(max_diff(back, A.entries()), 0.0);
  const auto rows = nlohmann::json::parse("[[1, [0, 2]], [3, 4]]");
  EXPECT_LE(max_diff(matrix_from_json(rows), m2(1.0, cplx(0.0, 2.0), 3.0, 4.0)), 0.0);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse("[[1, 2]]")), ParseError);
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(max_diff(random_sectorial(5, 1.0, 42).entries(), random_sectorial(5, 1.0, 42).entries()), 0.0);
  const auto A = random_sectorial(6, 0.7, 3);
  EXPECT_LE(A.spectral_angle(), 0.7 + 1e-9);
  const auto H = random_hilbert_contraction_gen(6, 7);
  for (Eigen::Index i = 0; i < H.eigenvalues().size(); ++i) EXPECT_GT(H.eigenvalues()(i).real(), 0.0);
}
