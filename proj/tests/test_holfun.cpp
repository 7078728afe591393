#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "opcalc/holfun.hpp"

using namespace opcalc;

namespace {

const cplx I(0.0, 1.0);

std::vector<HolFunction> catalog() {
  const auto r1 = HolFunction::resolvent(1.0);
  return {
      HolFunction::exp(2.0),
      HolFunction::exp(0.3),
      r1,
      HolFunction::resolvent(cplx(2.0, 3.0)),
      HolFunction::resolvent(cplx(1.0, 0.5), Domain::sector(kPi / 4)),
      HolFunction::cayley_power(1),
      HolFunction::cayley_power(5),
      HolFunction::phi(1.0),
      HolFunction::phi(10.0),
      HolFunction::power_exp(0.0),
      HolFunction::power_exp(0.5),
      HolFunction::power_exp(1.0),
      HolFunction::power_exp(2.0),
      HolFunction::arccot(),
      HolFunction::exp_arccot(),
      HolFunction::sector_exp(0.5, 1.0),
      HolFunction::sector_exp(1.5, 1.0, Domain::sector(kPi / 4)),
      HolFunction::bernstein_resolvent(BernsteinFunction::sqrt(), 1.0),
      HolFunction::bernstein_resolvent(BernsteinFunction::log1p(), 2.0),
      HolFunction::bernstein_resolvent(BernsteinFunction::z_over_1pz(), 1.0),
      HolFunction::bernstein_resolvent(BernsteinFunction::power(0.3), cplx(1.0, 1.0)),
      HolFunction::band_limited({{0.5, 1.0}, {2.0, -0.3}}),
      HolFunction::e_delta(0.5),
      HolFunction::e_delta(2.0),
      HolFunction::laplace({{0.0, 1.0}}, {ExpPolyTerm{0.0, 1.0, {-2.0}}}),
      HolFunction::laplace({{0.5, 0.2}}, {ExpPolyTerm{1.0, cplx(2.0, 1.0), {1.0, -0.5, 0.25}}}),
      HolFunction::constant(cplx(2.0, -1.0)),
      r1 + HolFunction::exp(1.0),
      r1 * HolFunction::cayley_power(2),
      arg_scale(HolFunction::phi(1.0), 3.0),
      arg_shift(HolFunction::arccot(), cplx(1.0, 1.0)),
      compose_power(r1, 0.5),
      compose_power(HolFunction::exp(1.0), 0.7),
      arg_invert(HolFunction::exp(1.0)),
      arg_invert(HolFunction::exp_arccot()),
      HolFunction::derivative_of(HolFunction::cayley_power(3)),
  };
}

// Random interior point at distance >= 0.01 from the domain boundary.
cplx random_interior(const Domain& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double r = std::exp(std::log(0.05) + u(rng) * std::log(20.0 / 0.05));
    const double psi = std::min(d.half_angle, 0.999 * kPi);
    const double phi = (2.0 * u(rng) - 1.0) * psi;
    const cplx z = std::polar(r, phi);
    const double dist = r * std::sin(std::min(psi - std::abs(phi), kPi / 2));
    if (dist >= 0.01) return z;
  }
}

// Richardson-extrapolated complex central difference.
template <class F>
cplx central_difference(F&& f, cplx z) {
  const double h = 1e-3 * std::max(0.05, std::min(1.0, std::abs(z)));
  auto d = [&](double hh) { return (f(z + hh) - f(z - hh)) / (2.0 * hh); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

}  // namespace

TEST(HolFunction, EvalExamples) {
  EXPECT_NEAR(std::abs(HolFunction::resolvent(1.0).eval(1.0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(HolFunction::cayley_power(1).eval(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(HolFunction::arccot().eval(1.0) - kPi / 4), 0.0, 1e-15);
}

TEST(HolFunction, DomainErrors) {
  EXPECT_THROW(HolFunction::resolvent(1.0).eval(cplx(0.0, 1.0)), DomainError);
  EXPECT_THROW(HolFunction::exp(1.0).eval(-1.0), DomainError);
  EXPECT_THROW(HolFunction::exp(1.0).deriv(0.0), DomainError);
  EXPECT_THROW(HolFunction::sector_exp(1.5, 1.0, Domain::sector(kPi / 4)).eval(cplx(1.0, 1.5)), DomainError);
  EXPECT_THROW(HolFunction::resolvent(-1.0), DomainError);
}

TEST(HolFunction, DerivExamples) {
  const cplx z(0.7, -1.3);
  EXPECT_NEAR(std::abs(HolFunction::exp(2.0).deriv(z) - (-2.0 * std::exp(-2.0 * z))), 0.0, 1e-15);
  EXPECT_NEAR(HolFunction::resolvent(1.0).deriv(0.5).real(), -1.0 / 2.25, 1e-15);
  const auto v = HolFunction::cayley_power(1);
  const cplx w(1.0, 1.0);
  const cplx fd = central_difference([&](cplx x) { return v.eval(x); }, w);
  EXPECT_LE(std::abs(v.deriv(w) - fd), 1e-7 * std::abs(v.deriv(w)));
}

TEST(HolFunction, DerivativeMatchesDifferenceQuotientOnCatalog) {
  std::mt19937_64 rng(20240607);
  for (const auto& f : catalog()) {
    for (int i = 0; i < 100; ++i) {
      const cplx z = random_interior(f.domain(), rng);
      const Jet j = f.jet(z);
      ASSERT_TRUE(std::isfinite(std::abs(j.v)) && std::isfinite(std::abs(j.d1))) << f.describe() << " " << z;
      const cplx fd = central_difference([&](cplx x) { return f.jet(x).v; }, z);
      EXPECT_LE(std::abs(j.d1 - fd), 1e-7 * (1.0 + std::abs(j.d1))) << f.describe() << " at " << z;
      if (f.has_second_derivative()) {
        const cplx fd2 = central_difference([&](cplx x) { return f.jet(x).d1; }, z);
        EXPECT_LE(std::abs(j.d2 - fd2), 1e-6 * (1.0 + std::abs(j.d2))) << f.describe() << " at " << z;
      }
    }
  }
}

TEST(HolFunction, ComposePowerExamples) {
  const auto e1 = HolFunction::exp(1.0);
  const auto r1 = HolFunction::resolvent(1.0);
  const cplx z(0.8, 0.4);
  EXPECT_NEAR(std::abs(compose_power(e1, 1.0).eval(z) - e1.eval(z)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(compose_power(r1, 0.5).eval(4.0) - 1.0 / 3.0), 0.0, 1e-15);
  const auto a = compose_power(e1, 0.5);
  const auto b = HolFunction::sector_exp(0.5, 1.0);
  EXPECT_NEAR(a.domain().half_angle, kPi, 1e-15);
  for (cplx w : {cplx(1.0, 0.0), cplx(0.3, 2.0), cplx(5.0, -4.0)}) {
    EXPECT_NEAR(std::abs(a.eval(w) - b.eval(w)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(a.deriv(w) - b.deriv(w)), 0.0, 1e-14);
  }
  EXPECT_THROW(compose_power(e1, 0.4), DomainError);
}

TEST(HolFunction, ComposePowerIsMultiplicative) {
  std::mt19937_64 rng(7);
  const auto f = HolFunction::resolvent(cplx(1.0, 0.5));
  for (auto [a, b] : {std::pair{0.5, 1.5}, {0.8, 0.9}, {1.2, 0.6}}) {
    const auto lhs = compose_power(compose_power(f, a), b);
    const auto rhs = compose_power(f, a * b);
    for (int i = 0; i < 50; ++i) {
      const cplx z = random_interior(lhs.domain(), rng);
      EXPECT_NEAR(std::abs(lhs.eval(z) - rhs.eval(z)), 0.0, 1e-12);
    }
  }
}

TEST(HolFunction, ProductCommutativeAssociative) {
  std::mt19937_64 rng(11);
  const auto f = HolFunction::phi(2.0), g = HolFunction::cayley_power(3), h = HolFunction::arccot();
  for (int i = 0; i < 100; ++i) {
    const cplx z = random_interior(Domain::half_plane(), rng);
    const cplx fg = (f * g).eval(z), gf = (g * f).eval(z);
    EXPECT_LE(std::abs(fg - gf), 4e-16 * (1.0 + std::abs(fg)));
    const cplx l = ((f * g) * h).eval(z), r = (f * (g * h)).eval(z);
    EXPECT_LE(std::abs(l - r), 1e-15 * (1.0 + std::abs(l)));
  }
}

TEST(HolFunction, TransformExamples) {
  const cplx z(0.9, -2.1);
  EXPECT_NEAR(std::abs(arg_scale(HolFunction::exp(1.0), 2.5).eval(z) - HolFunction::exp(2.5).eval(z)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mul(HolFunction::resolvent(1.0), HolFunction::resolvent(1.0)).eval(1.0) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(arg_shift(HolFunction::resolvent(1.0), 1.0).eval(z) - HolFunction::resolvent(2.0).eval(z)),
              0.0, 1e-15);
}

TEST(HolFunction, SectorialLimitExamples) {
  auto l = sectorial_limits(HolFunction::exp(1.0));
  EXPECT_EQ(l.at_zero, cplx(1.0));
  EXPECT_EQ(l.at_infinity, cplx(0.0));
  l = sectorial_limits(HolFunction::cayley_power(1));
  EXPECT_EQ(l.at_zero, cplx(-1.0));
  EXPECT_EQ(l.at_infinity, cplx(1.0));
  l = sectorial_limits(HolFunction::phi(1.0));
  EXPECT_EQ(l.at_zero, cplx(0.0));
  EXPECT_EQ(l.at_infinity, cplx(1.0));
  l = sectorial_limits(HolFunction::exp_arccot());
  EXPECT_NEAR(std::abs(l.at_zero - std::exp(kPi / 2)), 0.0, 1e-12);
}

TEST(HolFunction, CachedLimitsMatchRayZeroProbes) {
  for (const auto& f : catalog()) {
    if (f.kind() == FnKind::Derivative) continue;
    SectorialLimits l;
    ASSERT_NO_THROW(l = sectorial_limits(f)) << f.describe();
    ASSERT_TRUE(f.limit_at_zero() && f.limit_at_infinity()) << f.describe();
    // Slowly converging entries (fractional powers at 0) are compared further out.
    const bool slow = f.describe().find("0.5") != std::string::npos || f.kind() == FnKind::ArgPower ||
                      f.kind() == FnKind::BernsteinResolvent || f.kind() == FnKind::ArgInvert;
    const double r0 = slow ? 1e-20 : 1e-8;
    EXPECT_NEAR(std::abs(f.jet(r0).v - *f.limit_at_zero()), 0.0, 1e-6) << f.describe();
    // 1/(lambda + log(1+z)) decays only logarithmically at infinity.
    if (f.describe().find("log1p") != std::string::npos) continue;
    EXPECT_NEAR(std::abs(f.jet(1.0 / r0).v - *f.limit_at_infinity()), 0.0, 1e-6) << f.describe();
  }
}

TEST(HolFunction, NoLimitDetected) {
  EXPECT_THROW(sectorial_limits(HolFunction::derivative_of(HolFunction::power_exp(0.5))), NoLimit);
  EXPECT_THROW(sectorial_limits(HolFunction::sector_exp(1.0, I)), NoLimit);
}

TEST(HolFunction, GreenAndBoundedFlags) {
  EXPECT_TRUE(HolFunction::resolvent(1.0).good_for_green());
  EXPECT_FALSE(HolFunction::exp(1.0).good_for_green());
  EXPECT_FALSE(HolFunction::arccot().bounded());
  EXPECT_TRUE(HolFunction::exp_arccot().bounded());
  EXPECT_FALSE(HolFunction::power_exp(1.0).bounded());
}

TEST(Bernstein, MonotoneConcaveOnLogGrid) {
  for (const auto& g : {BernsteinFunction::sqrt(), BernsteinFunction::power(0.3), BernsteinFunction::log1p(),
                        BernsteinFunction::z_over_1pz()}) {
    for (int k = 0; k <= 60; ++k) {
      const double t = std::pow(10.0, -3.0 + 0.1 * k);
      EXPECT_GT(g.value(t).real(), 0.0) << g.name();
      EXPECT_GT(g.deriv(t).real(), 0.0) << g.name();
      EXPECT_LT(g.deriv2(t).real(), 0.0) << g.name();
      EXPECT_NEAR(g.value(t).imag(), 0.0, 1e-15);
    }
  }
}
