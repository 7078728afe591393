#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "opcalc/norms.hpp"

using namespace opcalc;
using quad::Verdict;

namespace {

constexpr double kCatalan = 0.915965594177219015054603514932;

// Double-exponential quadrature, written independently of the library engine.
double de_finite(const std::function<double(double)>& f, double a, double b, double h = 1.0 / 64) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double sum = 0.0;
  for (int k = -6 * int(1.0 / h); k <= 6 * int(1.0 / h); ++k) {
    const double t = k * h;
    const double u = 0.5 * kPi * std::sinh(t);
    const double x = std::tanh(u);
    const double w = 0.5 * kPi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
    const double p = c + r * x;
    if (!(p > a && p < b)) continue;
    const double v = f(p);
    if (std::isfinite(v)) sum += w * v;
  }
  return r * h * sum;
}

// int_0^inf via x = exp(pi/2 sinh t).
double de_half(const std::function<double(double)>& f, double h = 1.0 / 64) {
  double sum = 0.0;
  for (int k = -6 * int(1.0 / h); k <= 6 * int(1.0 / h); ++k) {
    const double t = k * h;
    const double x = std::exp(0.5 * kPi * std::sinh(t));
    const double w = 0.5 * kPi * std::cosh(t) * x;
    if (!(x > 0.0) || !std::isfinite(x)) continue;
    const double v = f(x);
    if (std::isfinite(v) && std::isfinite(w)) sum += w * v;
  }
  return h * sum;
}

// The Vs norm in polar coordinates: int_{-pi/2}^{pi/2} cos^s(th) int_0^inf |g(r e^{i th})| dr dth,
// with an optional radial breakpoint.
double polar_vs(const std::function<cplx(cplx)>& g, double s, double r_break = 0.0) {
  auto radial = [&](double th) {
    auto h = [&](double r) { return std::abs(g(std::polar(r, th))); };
    if (r_break > 0.0) {
      return de_finite(h, 0.0, r_break) + de_half([&](double x) { return h(r_break + x); });
    }
    return de_half(h);
  };
  auto outer = [&](double th) { return std::pow(std::cos(th), s) * radial(th); };
  return de_finite(outer, -0.5 * kPi, 0.0) + de_finite(outer, 0.0, 0.5 * kPi);
}

void expect_in(const NormReport& r) {
  EXPECT_EQ(r.membership, Membership::In) << quad::to_string(r.value.verdict);
  EXPECT_EQ(r.value.verdict, Verdict::Converged);
}

}  // namespace

// ---------------------------------------------------------------- B0 and B

TEST(B0Norm, ExponentialsHaveUnitNorm) {
  for (double t : {0.5, 1.0, 7.0, 1e3}) {
    const NormReport r = b0_norm(HolFunction::exp(t));
    expect_in(r);
    EXPECT_NEAR(r.value.value, 1.0, 1e-7) << t;
  }
}

TEST(B0Norm, ResolventHasUnitNorm) {
  const NormReport r = b0_norm(HolFunction::resolvent(1.0));
  expect_in(r);
  EXPECT_NEAR(r.value.value, 1.0, 1e-7);
}

TEST(B0Norm, ScaledResolventOracle) {
  // sup_beta |lambda + alpha + i beta|^{-2} = (Re lambda + alpha)^{-2}, integral 1/Re lambda.
  const NormReport r = b0_norm(HolFunction::resolvent(cplx(2.0, 3.0)));
  expect_in(r);
  EXPECT_NEAR(r.value.value, 0.5, 1e-7);
}

TEST(B0Norm, ExpArccotIsNotInB) {
  const NormReport r = b0_norm(HolFunction::exp_arccot());
  EXPECT_EQ(r.membership, Membership::NotIn);
  EXPECT_EQ(r.value.verdict, Verdict::Diverged);
}

TEST(BNorm, Examples) {
  EXPECT_NEAR(b_norm(HolFunction::resolvent(1.0)).value.value, 2.0, 1e-7);
  const NormReport c = b_norm(HolFunction::constant(1.0));
  expect_in(c);
  EXPECT_NEAR(c.value.value, 1.0, 1e-12);
  EXPECT_EQ(b_norm(HolFunction::arccot()).membership, Membership::NotIn);
}

TEST(BNorm, CayleyPowersGrowLikeLog) {
  std::vector<double> ratios;
  for (int n : {4, 16, 64, 256}) {
    const NormReport r = b_norm(HolFunction::cayley_power(n));
    expect_in(r);
    ratios.push_back(r.value.value / std::log(double(n)));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LE(*hi / *lo, 4.0);
}

TEST(BNorm, PhiGrowsLikeLog) {
  std::vector<double> ratios;
  for (double t : {10.0, 100.0, 1e3, 1e4}) {
    const NormReport r = b_norm(HolFunction::phi(t));
    expect_in(r);
    ratios.push_back(r.value.value / std::log(t));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 4.0);
}

TEST(WNorm, DerivativeIdentity) {
  // ||f'||_W = ||f||_B0.
  for (const HolFunction& f : {HolFunction::resolvent(1.0), HolFunction::cayley_power(3), HolFunction::exp(2.0)}) {
    const double w = w_norm(HolFunction::derivative_of(f)).value.value;
    const double b = b0_norm(f).value.value;
    EXPECT_NEAR(w, b, 1e-7 * b) << f.describe();
  }
}

// ---------------------------------------------------------------- sup norm

TEST(SupNorm, Examples) {
  EXPECT_NEAR(sup_norm(HolFunction::exp(1.0), Domain::half_plane()).value, 1.0, 1e-12);
  EXPECT_NEAR(sup_norm(HolFunction::cayley_power(1), Domain::half_plane()).value, 1.0, 1e-12);
  EXPECT_NEAR(sup_norm(HolFunction::phi(3.0), Domain::half_plane()).value, 1.0, 1e-9);
  const SupReport a = sup_norm(HolFunction::arccot(), Domain::half_plane());
  EXPECT_FALSE(a.bounded);
}

TEST(SupNorm, SectorAndBoundaryOracle) {
  // |1/(1 + z)| is largest at z = 0 on every sector.
  EXPECT_NEAR(sup_norm(HolFunction::resolvent(1.0), Domain::sector(kPi / 4)).value, 1.0, 1e-12);
  // arccot is bounded on sectors narrower than the half-plane.
  const SupReport a = sup_norm(HolFunction::arccot(), Domain::sector(kPi / 4));
  EXPECT_TRUE(a.bounded);
  EXPECT_NEAR(a.value, kPi / 2, 1e-9);
  // |e^{-z} + 0.5 e^{-2z}| on the axis peaks at 1.5.
  const HolFunction f = HolFunction::band_limited({{1.0, 1.0}, {2.0, 0.5}});
  EXPECT_NEAR(sup_norm(f, Domain::half_plane()).value, 1.5, 1e-9);
}

TEST(SupNorm, ExponentialSums) {
  // Rationally independent rates: the phases decouple and the supremum is sum |c_k|.
  const HolFunction a = HolFunction::band_limited({{1.0, 1.0}, {std::sqrt(2.0), cplx(0.0, -0.5)}});
  EXPECT_NEAR(sup_norm(a, Domain::half_plane()).value, 1.5, 1e-12);
  // e^{-i b} - e^{-2 i b} has modulus 2 |sin(b/2)|.
  const HolFunction b = HolFunction::band_limited({{1.0, 1.0}, {2.0, -1.0}});
  EXPECT_NEAR(sup_norm(b, Domain::half_plane()).value, 2.0, 1e-9);
  // 1 + e^{-3 i b} + e^{-6 i b} peaks at 3 where all phases agree.
  const HolFunction c = HolFunction::constant(1.0) + HolFunction::exp(3.0) + HolFunction::exp(6.0);
  EXPECT_NEAR(sup_norm(c, Domain::half_plane()).value, 3.0, 1e-9);
  // sup_b |e^{-i b} - 0.25 e^{-3 i b}| = 1.25 at b = pi / 2.
  const HolFunction d = HolFunction::band_limited({{1.0, 1.0}, {3.0, -0.25}});
  EXPECT_NEAR(sup_norm(d, Domain::half_plane()).value, 1.25, 1e-9);
  // b0 of a sum with independent rates is sum |c_k|.
  EXPECT_NEAR(b0_norm(a).value.value, 1.5, 1e-7);
  EXPECT_THROW(ds_norm(b, 1.0), Unsupported);
}

TEST(SupNorm, RegionWiderThanDomainFails) {
  EXPECT_THROW(sup_norm(HolFunction::sector_exp(3.0, 1.0), Domain::half_plane()), PreconditionFailed);
}

// ---------------------------------------------------------------- Ds

TEST(DsNorm, ResolventCatalanOracle) {
  // int_0^inf dr / |1 + r e^{i th}|^2 = th / sin th, so the s = 0 seminorm is 4G.
  const NormReport r = ds0_norm(HolFunction::resolvent(1.0), 0.0);
  expect_in(r);
  EXPECT_NEAR(r.value.value, 4.0 * kCatalan, 1e-7);
}

TEST(DsNorm, ResolventPolarOracle) {
  for (double s : {-0.5, 0.5, 1.0, 2.5}) {
    auto oracle = de_finite([s](double th) { return 2.0 * std::pow(std::cos(th), s) * (th > 0 ? th / std::sin(th) : 1.0); },
                            0.0, 0.5 * kPi);
    const NormReport r = ds_norm(HolFunction::resolvent(1.0), s);
    expect_in(r);
    EXPECT_NEAR(r.value.value, oracle, 1e-7 * oracle) << s;
  }
}

TEST(DsNorm, PowerExpBoundAndOracle) {
  const HolFunction f = HolFunction::power_exp(1.0);
  const NormReport r = ds_norm(f, 2.0);
  expect_in(r);
  EXPECT_LE(r.value.value, 2.0 * kPi);
  const double oracle = polar_vs([](cplx z) { return (1.0 - z) * std::exp(-z); }, 2.0, 1.0);
  EXPECT_NEAR(r.value.value, oracle, 1e-6 * oracle);
}

TEST(DsNorm, MembershipFailures) {
  const NormReport a = ds_norm(HolFunction::power_exp(1.0), 0.5);
  EXPECT_EQ(a.membership, Membership::NotIn);
  const NormReport b = ds_norm(HolFunction::exp(1.0), 0.0);
  EXPECT_EQ(b.membership, Membership::NotIn);
  // e^{-z} is in Ds for every s > 0.
  expect_in(ds_norm(HolFunction::exp(1.0), 0.25));
}

TEST(DsNorm, PowerExpThreshold) {
  for (double nu : {0.5, 1.5}) {
    const HolFunction f = HolFunction::power_exp(nu);
    EXPECT_EQ(ds_norm(f, nu - 0.25).membership, Membership::NotIn) << nu;
    const NormReport in = ds_norm(f, nu + 0.5);
    expect_in(in);
    EXPECT_LE(in.value.value, 2.0 * std::beta(0.25, 0.5) * std::tgamma(nu + 1.0));
  }
}

TEST(DsNorm, MonotoneInS) {
  const std::vector<HolFunction> fs{HolFunction::resolvent(1.0), HolFunction::exp(1.0), HolFunction::cayley_power(2),
                                    HolFunction::phi(1.0), HolFunction::arccot(),
                                    HolFunction::bernstein_resolvent(BernsteinFunction::sqrt(), 1.0)};
  const std::vector<std::pair<double, double>> pairs{{0.5, 1.0}, {1.0, 2.0}, {2.0, 3.0}};
  for (const auto& f : fs) {
    for (auto [s, sigma] : pairs) {
      const NormReport lo = ds_norm(f, s);
      if (lo.membership != Membership::In) continue;
      const NormReport hi = ds_norm(f, sigma);
      expect_in(hi);
      EXPECT_LE(hi.value.value, lo.value.value + 1e-8) << f.describe() << " s=" << s;
    }
  }
}

TEST(DsNorm, ArgScaleInvariance) {
  for (const auto& [f, s] : std::vector<std::pair<HolFunction, double>>{{HolFunction::resolvent(1.0), 1.0},
                                                                         {HolFunction::cayley_power(2), 0.5},
                                                                         {HolFunction::arccot(), 1.5}}) {
    const double base = ds_norm(f, s).value.value;
    for (double t : {0.1, 1.0, 10.0}) {
      EXPECT_NEAR(ds_norm(arg_scale(f, t), s).value.value, base, 1e-6) << f.describe() << " t=" << t;
    }
  }
}

TEST(DsNorm, InversionInvariance) {
  for (const auto& f : {HolFunction::resolvent(1.0), HolFunction::resolvent(cplx(1.0, 1.0)), HolFunction::cayley_power(3)}) {
    for (double s : {0.0, 1.0}) {
      const double a = ds0_norm(f, s).value.value;
      const double b = ds0_norm(arg_invert(f), s).value.value;
      EXPECT_NEAR(a, b, 1e-6) << f.describe() << " s=" << s;
    }
  }
}

TEST(DsNorm, CayleyPowersBounded) {
  const double bound = 16.0 * (std::beta(0.5, 0.5) + std::pow(2.0, -0.5));
  for (int n : {1, 4, 16}) {
    const NormReport r = ds0_norm(HolFunction::cayley_power(n), 1.0);
    expect_in(r);
    EXPECT_LE(r.value.value, bound) << n;
  }
}

TEST(DsNorm, BernsteinResolventScaling) {
  // (lambda + g(z))^{-1} = lambda^{-1} (1 + g(z / lambda^{1/p}))^{-1} for g = z^p, so the norm
  // scales exactly like 1/lambda.
  for (const BernsteinFunction& g : {BernsteinFunction::sqrt(), BernsteinFunction::power(0.7)}) {
    double prev = 0.0;
    for (double lambda : {1.0, 10.0, 100.0}) {
      const NormReport r = ds_norm(HolFunction::bernstein_resolvent(g, lambda), 2.5);
      expect_in(r);
      if (prev > 0.0) {
        EXPECT_NEAR(prev / r.value.value, 10.0, 0.5) << g.name();
        EXPECT_NEAR(prev / r.value.value, 10.0, 1e-5) << g.name();
      }
      prev = r.value.value;
    }
  }
}

TEST(DsInfNorm, AddsSupNorm) {
  const NormReport r = ds_inf_norm(HolFunction::resolvent(1.0), 0.0);
  expect_in(r);
  EXPECT_NEAR(r.value.value, 1.0 + 4.0 * kCatalan, 1e-7);
  EXPECT_EQ(ds_inf_norm(HolFunction::arccot(), 1.0).membership, Membership::NotIn);
}

// ---------------------------------------------------------------- H1 and Hpsi

TEST(H1Sector, ResolventDerivativeOracle) {
  // int_0^inf dt / |1 + t e^{i phi}|^2 = phi / sin phi, increasing in phi.
  for (double psi : {kPi / 6, kPi / 4, kPi / 3}) {
    const NormReport r = h1_sector_norm(HolFunction::derivative_of(HolFunction::resolvent(1.0)), psi);
    expect_in(r);
    EXPECT_NEAR(r.value.value, 2.0 * psi / std::sin(psi), 1e-7) << psi;
  }
}

TEST(H1Sector, SectorExponentialOracle) {
  // |d/dz e^{-z^g}| integrates along the ray to 1/cos(g phi), so the norm is 2/cos(g psi).
  for (auto [gamma, psi] : std::vector<std::pair<double, double>>{{1.0, kPi / 4}, {1.5, kPi / 4}, {0.5, kPi / 2.5}}) {
    const HolFunction e = HolFunction::sector_exp(gamma, 1.0);
    const NormReport r = h1_sector_norm(HolFunction::derivative_of(e), psi);
    expect_in(r);
    EXPECT_LE(r.value.value, 2.0 / std::cos(gamma * psi) * (1 + 1e-9));
    EXPECT_NEAR(r.value.value, 2.0 / std::cos(gamma * psi), 1e-6) << gamma;
  }
}

TEST(HpsiNorm, ResolventScalesInverselyWithLambda) {
  const double a = h1_sector_norm(HolFunction::derivative_of(HolFunction::resolvent(1.0)), kPi / 4).value.value;
  const double b = h1_sector_norm(HolFunction::derivative_of(HolFunction::resolvent(10.0)), kPi / 4).value.value;
  EXPECT_NEAR(a / b, 10.0, 1e-2);
  const NormReport h = hpsi_norm(HolFunction::resolvent(1.0), kPi / 4);
  expect_in(h);
  EXPECT_NEAR(h.value.value, 1.0 + 2.0 * (kPi / 4) / std::sin(kPi / 4), 1e-7);
}

TEST(HpsiNorm, Constant) {
  const NormReport r = hpsi_norm(HolFunction::constant(cplx(3.0, -4.0)), kPi / 3);
  expect_in(r);
  EXPECT_NEAR(r.value.value, 5.0, 1e-12);
}

TEST(HpsiNorm, BernsteinResolventBound) {
  const double psi = kPi / 6, phi = kPi / 2;
  const HolFunction f = HolFunction::bernstein_resolvent(BernsteinFunction::sqrt(), 1.0, Domain::sector(psi));
  const NormReport r = hpsi_norm(f, psi);
  expect_in(r);
  const double s = std::sin((phi - psi) / 2);
  const double bound = 2.0 * (1.0 / std::sin(std::min(phi, kPi / 2)) + 2.0 / (std::cos(psi) * s * s));
  EXPECT_LE(r.value.value, bound);
}

// ---------------------------------------------------------------- E

TEST(E0Norm, ResolventApproachesPi) {
  // alpha int |(1 + alpha + i beta)^{-2}| d beta = pi alpha / (1 + alpha).
  const NormReport r = e0_norm(HolFunction::resolvent(1.0));
  expect_in(r);
  EXPECT_NEAR(r.value.value, kPi, 1e-6);
  const NormReport fine = e0_norm(HolFunction::resolvent(1.0), {}, 8);
  EXPECT_NEAR(fine.value.value, r.value.value, 1e-6);
}

TEST(E0Norm, ConstantAndMatrixElement) {
  EXPECT_NEAR(e0_norm(HolFunction::constant(1.0)).value.value, 0.0, 1e-15);
  // <(z + diag(1, 2))^{-1} e1, e1> = 1/(z + 1).
  ExpPolyTerm t1{0.0, 1.0, {1.0}}, t2{0.0, 2.0, {0.0}};
  const HolFunction g = HolFunction::laplace({}, {t1, t2});
  const NormReport r = e0_norm(g);
  expect_in(r);
  EXPECT_NEAR(r.value.value, kPi, 1e-6);
  EXPECT_NEAR(e_norm(HolFunction::cayley_power(1)).value.value, 1.0 + e0_norm(HolFunction::cayley_power(1)).value.value, 1e-9);
}

TEST(E0Norm, Membership) {
  // |d/dz e^{-z}| is constant on vertical lines.
  EXPECT_EQ(e0_norm(HolFunction::exp(1.0)).membership, Membership::NotIn);
  // alpha int |1 + z^2|^{-1} d beta behaves like alpha log(1/alpha) near 0 and tends to pi.
  const NormReport r = e0_norm(HolFunction::arccot());
  expect_in(r);
  EXPECT_NEAR(r.value.value, kPi, 1e-6);
}

// ---------------------------------------------------------------- pairings

TEST(Duality, ResolventPairClosedForm) {
  // Residues give int_R (mu + alpha - i beta)^{-2} (lambda + alpha + i beta)^{-2} d beta =
  // 4 pi / (mu + lambda + 2 alpha)^3, so <r_mu, r_lambda> = pi / (2 (mu + lambda)).
  for (auto [mu, lambda] : std::vector<std::pair<double, double>>{{2.0, 1.0}, {1.0, 1.0}, {0.5, 3.0}}) {
    const auto d = duality_pairing(HolFunction::resolvent(mu), HolFunction::resolvent(lambda));
    EXPECT_EQ(d.verdict, Verdict::Converged);
    EXPECT_NEAR(d.value.real(), kPi / (2.0 * (mu + lambda)), 1e-8);
    EXPECT_NEAR(d.value.imag(), 0.0, 1e-10);
  }
}

TEST(Duality, ReproducingFormula) {
  // f(z) = f(inf) + (2/pi) <r_z, f>.
  for (const auto& f : {HolFunction::resolvent(1.0), HolFunction::cayley_power(3), HolFunction::exp(1.0),
                        HolFunction::phi(2.0)}) {
    for (cplx z : {cplx(2.0, 0.0), cplx(0.5, 1.0)}) {
      const auto d = duality_pairing(HolFunction::resolvent(z), f);
      const cplx rebuilt = *f.limit_at_infinity() + 2.0 / kPi * d.value;
      EXPECT_NEAR(std::abs(rebuilt - f.eval(z)), 0.0, 1e-7) << f.describe() << " z=" << z;
    }
  }
}

TEST(Duality, ConstantIsAnnihilated) {
  const auto d = duality_pairing(HolFunction::resolvent(1.0), HolFunction::constant(2.0));
  EXPECT_NEAR(std::abs(d.value), 0.0, 1e-15);
}

TEST(Duality, BoundedByNormProduct) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 4.0), v(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 3), pn(1, 5);
  auto random_b = [&]() {
    switch (pick(rng)) {
      case 0:
        return HolFunction::resolvent(cplx(u(rng), v(rng)));
      case 1:
        return HolFunction::exp(u(rng));
      case 2:
        return HolFunction::cayley_power(pn(rng));
      default:
        return HolFunction::phi(u(rng));
    }
  };
  for (int k = 0; k < 20; ++k) {
    const HolFunction g = pick(rng) % 2 ? HolFunction::resolvent(cplx(u(rng), v(rng))) : HolFunction::cayley_power(pn(rng));
    const HolFunction f = random_b();
    const double e0 = e0_norm(g).value.value;
    const double b0 = b0_norm(f).value.value;
    const auto d = duality_pairing(g, f);
    EXPECT_LE(std::abs(d.value), e0 * b0 * (1 + 1e-8)) << g.describe() << " " << f.describe();
  }
}

TEST(Duality, PreconditionFailure) {
  EXPECT_THROW(duality_pairing(HolFunction::resolvent(1.0), HolFunction::exp_arccot()), PreconditionFailed);
}

TEST(BoundaryPairing, MatchesDuality) {
  for (auto [g, f] : std::vector<std::pair<HolFunction, HolFunction>>{
           {HolFunction::resolvent(1.0), HolFunction::resolvent(1.0)},
           {HolFunction::resolvent(1.0), HolFunction::resolvent(2.0)},
           {HolFunction::resolvent(cplx(1.0, 2.0)), HolFunction::cayley_power(2)}}) {
    const auto b = boundary_pairing(g, f);
    const auto d = duality_pairing(g, f);
    EXPECT_NEAR(std::abs(b.value - d.value), 0.0, 1e-6) << g.describe() << " " << f.describe();
  }
  EXPECT_NEAR(boundary_pairing(HolFunction::resolvent(1.0), HolFunction::resolvent(1.0)).value.real(), kPi / 4, 1e-9);
  EXPECT_NEAR(std::abs(boundary_pairing(HolFunction::resolvent(1.0), HolFunction::constant(3.0)).value), 0.0, 1e-15);
  EXPECT_THROW(boundary_pairing(HolFunction::resolvent(1.0), HolFunction::exp(1.0)), PreconditionFailed);
}

// ---------------------------------------------------------------- Q_s

TEST(ApplyQs, ResolventReproduction) {
  const HolFunction d = HolFunction::derivative_of(HolFunction::resolvent(1.0));
  const auto q = apply_Q_s(d, 1.0, 1.0);
  EXPECT_EQ(q.verdict, Verdict::Converged);
  EXPECT_NEAR(q.value.real(), 0.5, 1e-8);
  EXPECT_NEAR(q.value.imag(), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(apply_Q_s(HolFunction::constant(0.0), 1.0, 1.0).value), 0.0, 1e-15);
}

TEST(ApplyQs, PowerExpReproduction) {
  const HolFunction f = HolFunction::power_exp(1.0);
  const HolFunction d = HolFunction::derivative_of(f);
  for (cplx z : {cplx(0.5, 0.0), cplx(1.0, 1.0), cplx(4.0, 0.0), cplx(0.0, 0.0)}) {
    const auto q = apply_Q_s(d, 2.0, z);
    const cplx expect = z * std::exp(-z);
    EXPECT_NEAR(std::abs(q.value - expect), 0.0, 1e-6) << z;
  }
}

TEST(ApplyQs, OtherOrders) {
  const HolFunction f = HolFunction::cayley_power(2);
  const HolFunction d = HolFunction::derivative_of(f);
  for (double s : {-0.5, 0.0, 1.5}) {
    const cplx z(0.7, -0.4);
    const auto q = apply_Q_s(d, s, z);
    EXPECT_NEAR(std::abs(q.value + 1.0 - f.eval(z)), 0.0, 1e-6) << s;
  }
}

TEST(ApplyQs, PreconditionFailure) {
  // e^{-z}' is not in V_0.
  EXPECT_THROW(apply_Q_s(HolFunction::derivative_of(HolFunction::exp(1.0)), 0.0, 1.0), PreconditionFailed);
}

// ---------------------------------------------------------------- Gest

TEST(Gest, SingleTermAndZero) {
  const GestCheck g = gest_bound_check({{1.0, 1.0}}, 1.0, 1.0);
  EXPECT_NEAR(g.b_norm, 2.0, 1e-7);
  EXPECT_NEAR(g.bound, 1.0 + 4.0 * std::log(2.0), 1e-9);
  EXPECT_TRUE(g.holds);
  const GestCheck z = gest_bound_check({{1.0, 0.0}}, 0.5, 8.0);
  EXPECT_EQ(z.b_norm, 0.0);
  EXPECT_EQ(z.bound, 0.0);
  EXPECT_TRUE(z.holds);
}

TEST(Gest, RandomCombinationsHold) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0.5, 8.0), c(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<std::pair<double, cplx>> terms;
    for (int j = 0; j < 5; ++j) terms.push_back({t(rng), cplx(c(rng), c(rng))});
    const GestCheck g = gest_bound_check(terms, 0.5, 8.0);
    EXPECT_EQ(g.verdict, Verdict::Converged);
    EXPECT_TRUE(g.holds) << g.b_norm << " vs " << g.bound;
  }
}

TEST(Gest, RejectsOutOfRangeExponent) {
  EXPECT_THROW(gest_bound_check({{9.0, 1.0}}, 0.5, 8.0), DomainError);
}

// ---------------------------------------------------------------- inclusions and shifts

TEST(Inclusions, HalfPlaneHardySobolevInB) {
  for (const auto& f : {HolFunction::resolvent(1.0), HolFunction::resolvent(cplx(1.0, 2.0)), HolFunction::cayley_power(2),
                        HolFunction::bernstein_resolvent(BernsteinFunction::z_over_1pz(), 1.0)}) {
    const NormReport h = hpsi_norm(f, kPi / 2);
    if (h.membership != Membership::In) continue;
    expect_in(b0_norm(f));
  }
  // e^{-z} is in B but its derivative is not integrable on the boundary rays.
  EXPECT_EQ(hpsi_norm(HolFunction::exp(1.0), kPi / 2).membership, Membership::NotIn);
}

TEST(Inclusions, BInsideD1AndDsInsideHpsi) {
  for (const auto& f : {HolFunction::exp(1.0), HolFunction::resolvent(1.0), HolFunction::cayley_power(4),
                        HolFunction::phi(10.0), HolFunction::exp(0.5) * HolFunction::resolvent(2.0)}) {
    if (b0_norm(f).membership != Membership::In) continue;
    expect_in(ds_norm(f, 1.0));
  }
  for (const auto& f : {HolFunction::resolvent(1.0), HolFunction::arccot(), HolFunction::exp_arccot(),
                        HolFunction::cayley_power(4), HolFunction::exp(1.0)}) {
    if (ds_norm(f, 1.0).membership != Membership::In) continue;
    const NormReport h = hpsi_norm(f, kPi / 4);
    expect_in(h);
    EXPECT_TRUE(std::isfinite(h.value.value)) << f.describe();
  }
}

TEST(Shifts, ContractionInB) {
  for (const auto& f : {HolFunction::resolvent(1.0), HolFunction::cayley_power(3), HolFunction::exp(1.0),
                        HolFunction::phi(10.0)}) {
    const double base = b_norm(f).value.value;
    for (cplx tau : {cplx(0.5, 0.0), cplx(1.0, 1.0)}) {
      EXPECT_LE(b_norm(arg_shift(f, tau)).value.value, base + 1e-8) << f.describe() << " tau=" << tau;
    }
  }
}

// ---------------------------------------------------------------- HP and dispatch

TEST(HpNorm, CatalogMeasures) {
  EXPECT_NEAR(hp_norm_of(HolFunction::exp(2.0)).value.value, 1.0, 1e-14);
  EXPECT_NEAR(hp_norm_of(HolFunction::resolvent(1.0)).value.value, 1.0, 1e-12);
  EXPECT_NEAR(hp_norm_of(HolFunction::cayley_power(1)).value.value, 3.0, 1e-10);
  // e^{-2z}/(z+1): delta_2 * e^{-t} dt has mass 1.
  EXPECT_NEAR(hp_norm_of(HolFunction::exp(2.0) * HolFunction::resolvent(1.0)).value.value, 1.0, 1e-10);
  // r_1(2z) = (1/2) r_{1/2}(z), mass 1.
  EXPECT_NEAR(hp_norm_of(arg_scale(HolFunction::resolvent(1.0), 2.0)).value.value, 1.0, 1e-10);
  // r_1(z + 1) = r_2(z), mass 1/2.
  EXPECT_NEAR(hp_norm_of(arg_shift(HolFunction::resolvent(1.0), 1.0)).value.value, 0.5, 1e-10);
  EXPECT_THROW(hp_norm_of(HolFunction::arccot()), PreconditionFailed);
}

TEST(Space, ParseAndDescribe) {
  EXPECT_EQ(Space::parse("B").kind, SpaceKind::B);
  const Space d = Space::parse("Ds(1.5)");
  EXPECT_EQ(d.kind, SpaceKind::Ds);
  EXPECT_DOUBLE_EQ(d.param, 1.5);
  EXPECT_NEAR(Space::parse("HPsi(pi/4)").param, kPi / 4, 1e-15);
  EXPECT_NEAR(Space::parse("H1Sector(2pi/5)").param, 2 * kPi / 5, 1e-15);
  EXPECT_EQ(Space::parse("DsInf(2)").describe(), "DsInf(2)");
  EXPECT_THROW(Space::parse("Ds"), ParseError);
  EXPECT_THROW(Space::parse("B(1)"), ParseError);
  EXPECT_THROW(Space::parse("Q"), ParseError);
}

TEST(ComputeNorm, Dispatch) {
  EXPECT_NEAR(compute_norm(Space::parse("B"), HolFunction::resolvent(1.0)).value.value, 2.0, 1e-7);
  EXPECT_NEAR(compute_norm(Space::parse("HP"), HolFunction::exp(1.0)).value.value, 1.0, 1e-12);
  EXPECT_NEAR(compute_norm(Space::parse("Ds(0)"), HolFunction::resolvent(1.0)).value.value, 4.0 * kCatalan, 1e-7);
}
