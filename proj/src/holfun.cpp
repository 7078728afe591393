#include "opcalc/holfun.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace opcalc {

namespace {

constexpr double kAngleSlack = 1e-12;
const cplx kI(0.0, 1.0);

std::string num(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string cnum(cplx z) {
  std::string s = num(z.real());
  if (z.imag() >= 0.0 || std::isnan(z.imag())) s += "+";
  return s + num(z.imag()) + "i";
}

struct ProbeTable {
  std::array<std::array<cplx, 3>, 8> zero{};
  std::array<std::array<cplx, 3>, 8> inf{};
};

}  // namespace

struct HolFunction::Node {
  FnKind kind = FnKind::Constant;
  Domain domain;
  std::vector<cplx> p;
  int n = 0;
  std::optional<BernsteinFunction> bern;
  std::vector<std::pair<double, cplx>> atoms;
  std::vector<ExpPolyTerm> poly;
  std::vector<HolFunction> kids;
  std::optional<cplx> f0;
  std::optional<cplx> finf;
  bool bounded = true;
  bool green = false;
  bool second = true;
  std::vector<double> features;
  double freq = 0.0;
  std::string text;

  mutable std::once_flag probe_once;
  mutable ProbeTable probes;
};

using NodePtr = std::shared_ptr<HolFunction::Node>;

namespace {

NodePtr fresh(FnKind k, Domain d = Domain::half_plane()) {
  auto n = std::make_shared<HolFunction::Node>();
  n->kind = k;
  n->domain = d;
  return n;
}

HolFunction wrap(NodePtr n) { return HolFunction(std::shared_ptr<const HolFunction::Node>(std::move(n))); }

void sort_features(std::vector<double>& f) {
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
}

// e_delta profile F(q) = (1 - e^{-q})/q and its first two derivatives.
std::array<cplx, 3> edelta_profile(cplx q) {
  if (std::abs(q) < 0.1) {
    cplx f = 0.0, f1 = 0.0, f2 = 0.0;
    cplx qk = 1.0;  // q^k
    double fact = 1.0;  // (k+1)!
    for (int k = 0; k < 16; ++k) {
      fact *= (k + 1);
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      f += sgn * qk / fact;
      if (k + 1 < 16) {
        const double fact1 = fact * (k + 2);
        f1 += -sgn * double(k + 1) * qk / fact1;
        f2 += sgn * double(k + 1) * double(k + 2) * qk / (fact1 * (k + 3));
      }
      qk *= q;
    }
    return {f, f1, f2};
  }
  const cplx e = std::exp(-q);
  return {(1.0 - e) / q, (e * (q + 1.0) - 1.0) / (q * q), (2.0 - e * (q * q + 2.0 * q + 2.0)) / (q * q * q)};
}

cplx arccot_value(cplx z) {
  if (std::abs(z) >= 1.0) return std::atan(1.0 / z);
  return std::log((z + kI) / (z - kI)) / (2.0 * kI);
}

}  // namespace

// ---------------------------------------------------------------- Domain

Domain Domain::sector(double psi) {
  if (!(psi > 0.0) || psi > kPi + kAngleSlack) throw DomainError("sector half-angle must lie in (0, pi]");
  return Domain{std::min(psi, kPi)};
}

bool Domain::is_half_plane() const { return std::abs(half_angle - kPi / 2) <= kAngleSlack; }
bool Domain::contains_half_plane() const { return half_angle >= kPi / 2 - kAngleSlack; }

bool Domain::contains(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || z == 0.0) return false;
  if (is_half_plane()) return z.real() > 0.0;
  return std::abs(std::arg(z)) < half_angle;
}

bool Domain::contains_closure(cplx z) const {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  if (z == 0.0) return true;
  if (is_half_plane()) return z.real() >= 0.0;
  return std::abs(std::arg(z)) <= half_angle + kAngleSlack;
}

std::string Domain::describe() const {
  if (is_half_plane()) return "HalfPlane";
  return "Sector(" + num(half_angle) + ")";
}

// ---------------------------------------------------------------- Bernstein

BernsteinFunction BernsteinFunction::sqrt() { return {BernsteinKind::Sqrt, 0.5}; }
BernsteinFunction BernsteinFunction::power(double e) {
  if (!(e > 0.0 && e < 1.0)) throw DomainError("Bernstein power exponent must lie in (0,1)");
  return {BernsteinKind::Power, e};
}
BernsteinFunction BernsteinFunction::log1p() { return {BernsteinKind::Log1p, 0.0}; }
BernsteinFunction BernsteinFunction::z_over_1pz() { return {BernsteinKind::ZOver1pZ, 0.0}; }

cplx BernsteinFunction::value(cplx z) const {
  switch (kind_) {
    case BernsteinKind::Sqrt:
      return std::sqrt(z);
    case BernsteinKind::Power:
      return std::pow(z, exponent_);
    case BernsteinKind::Log1p:
      return std::log(1.0 + z);
    case BernsteinKind::ZOver1pZ:
      return z / (1.0 + z);
  }
  return 0.0;
}

cplx BernsteinFunction::deriv(cplx z) const {
  switch (kind_) {
    case BernsteinKind::Sqrt:
      return 0.5 / std::sqrt(z);
    case BernsteinKind::Power:
      return exponent_ * std::pow(z, exponent_) / z;
    case BernsteinKind::Log1p:
      return 1.0 / (1.0 + z);
    case BernsteinKind::ZOver1pZ:
      return 1.0 / ((1.0 + z) * (1.0 + z));
  }
  return 0.0;
}

cplx BernsteinFunction::deriv2(cplx z) const {
  switch (kind_) {
    case BernsteinKind::Sqrt:
      return -0.25 / (z * std::sqrt(z));
    case BernsteinKind::Power:
      return exponent_ * (exponent_ - 1.0) * std::pow(z, exponent_) / (z * z);
    case BernsteinKind::Log1p:
      return -1.0 / ((1.0 + z) * (1.0 + z));
    case BernsteinKind::ZOver1pZ:
      return -2.0 / ((1.0 + z) * (1.0 + z) * (1.0 + z));
  }
  return 0.0;
}

std::optional<cplx> BernsteinFunction::at_infinity() const {
  if (kind_ == BernsteinKind::ZOver1pZ) return cplx(1.0);
  return std::nullopt;
}

std::string BernsteinFunction::name() const {
  switch (kind_) {
    case BernsteinKind::Sqrt:
      return "sqrt";
    case BernsteinKind::Power:
      return "power(" + num(exponent_) + ")";
    case BernsteinKind::Log1p:
      return "log1p";
    case BernsteinKind::ZOver1pZ:
      return "z_over_1pz";
  }
  return "?";
}

cplx ipow(cplx z, int n) {
  if (n < 0) return 1.0 / ipow(z, -n);
  cplx r = 1.0, b = z;
  while (n > 0) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

// ---------------------------------------------------------------- catalog

HolFunction::HolFunction() : HolFunction(constant(0.0)) {}

HolFunction HolFunction::constant(cplx c) {
  auto n = fresh(FnKind::Constant, Domain{kPi});
  n->p = {c};
  n->f0 = c;
  n->finf = c;
  n->green = true;
  n->text = c.imag() == 0.0 ? num(c.real()) : "(" + cnum(c) + ")";
  return wrap(n);
}

HolFunction HolFunction::exp(double t) {
  if (!(t >= 0.0)) throw DomainError("exp requires t >= 0");
  auto n = fresh(FnKind::Exp);
  n->p = {t};
  n->f0 = 1.0;
  n->finf = t > 0.0 ? cplx(0.0) : cplx(1.0);
  n->features = {0.0};
  n->freq = t;
  n->text = "exp(t=" + num(t) + ")";
  return wrap(n);
}

HolFunction HolFunction::resolvent(cplx lambda, std::optional<Domain> dom) {
  const Domain d = dom.value_or(Domain::half_plane());
  if (lambda == 0.0 || std::abs(std::arg(lambda)) >= kPi - d.half_angle) {
    throw DomainError("resolvent pole -lambda must lie outside the closed domain");
  }
  auto n = fresh(FnKind::Resolvent, d);
  n->p = {lambda};
  n->f0 = 1.0 / lambda;
  n->finf = 0.0;
  n->green = lambda.real() > 0.0;
  n->features = {-lambda.imag()};
  n->text = "resolvent(" + cnum(lambda) + ")";
  return wrap(n);
}

HolFunction HolFunction::cayley_power(int k) {
  if (k < 0) throw DomainError("cayley power must be >= 0");
  auto n = fresh(FnKind::CayleyPower);
  n->n = k;
  n->f0 = (k % 2 == 0) ? 1.0 : -1.0;
  n->finf = 1.0;
  n->green = true;
  n->features = {0.0};
  n->text = "cayley^" + std::to_string(k);
  return wrap(n);
}

HolFunction HolFunction::phi(double t) {
  if (!(t > 0.0)) throw DomainError("phi requires t > 0");
  auto n = fresh(FnKind::PhiT);
  n->p = {t};
  n->f0 = 0.0;
  n->finf = 1.0;
  n->features = {0.0};
  n->text = "phi(t=" + num(t) + ")";
  return wrap(n);
}

HolFunction HolFunction::power_exp(double nu) {
  if (!(nu >= 0.0)) throw DomainError("power_exp requires nu >= 0");
  auto n = fresh(FnKind::PowerExp);
  n->p = {nu};
  n->f0 = nu > 0.0 ? cplx(0.0) : cplx(1.0);
  n->finf = 0.0;
  n->bounded = nu == 0.0;
  n->features = {0.0};
  n->freq = 1.0;
  n->text = "power_exp(nu=" + num(nu) + ")";
  return wrap(n);
}

HolFunction HolFunction::arccot() {
  auto n = fresh(FnKind::Arccot);
  n->f0 = kPi / 2;
  n->finf = 0.0;
  n->bounded = false;
  n->features = {-1.0, 0.0, 1.0};
  n->text = "arccot";
  return wrap(n);
}

HolFunction HolFunction::exp_arccot() {
  auto n = fresh(FnKind::ExpArccot);
  n->f0 = std::exp(kPi / 2);
  n->finf = 1.0;
  n->features = {-1.0, 0.0, 1.0};
  n->text = "exp_arccot";
  return wrap(n);
}

HolFunction HolFunction::sector_exp(double gamma, cplx lambda, std::optional<Domain> dom) {
  if (!(gamma > 0.0)) throw DomainError("sector_exp requires gamma > 0");
  if (lambda == 0.0) throw DomainError("sector_exp requires lambda != 0");
  Domain d = dom.value_or(Domain{std::min(kPi / 2, kPi / gamma)});
  if (gamma * d.half_angle > kPi + kAngleSlack) throw DomainError("sector_exp domain too wide for gamma");
  auto n = fresh(FnKind::SectorExp, d);
  n->p = {gamma, lambda};
  n->f0 = 1.0;
  n->finf = 0.0;
  n->bounded = gamma * d.half_angle + std::abs(std::arg(lambda)) <= kPi / 2 + kAngleSlack;
  n->features = {0.0};
  n->text = "sector_exp(gamma=" + num(gamma) + ",lambda=" + cnum(lambda) + ")";
  if (dom) n->text.insert(n->text.size() - 1, ",psi=" + num(d.half_angle));
  return wrap(n);
}

HolFunction HolFunction::bernstein_resolvent(const BernsteinFunction& g, cplx lambda, std::optional<Domain> dom) {
  const Domain d = dom.value_or(Domain::half_plane());
  if (lambda == 0.0 || std::abs(std::arg(lambda)) >= kPi - std::min(d.half_angle, kPi / 2)) {
    throw DomainError("bernstein_resolvent requires -lambda outside the image sector");
  }
  auto n = fresh(FnKind::BernsteinResolvent, d);
  n->p = {lambda};
  n->bern = g;
  n->f0 = 1.0 / (lambda + g.at_zero());
  auto ginf = g.at_infinity();
  n->finf = ginf ? 1.0 / (lambda + *ginf) : cplx(0.0);
  n->features = {0.0};
  n->text = "bernstein_resolvent(g=" + g.name() + ",lambda=" + cnum(lambda) + ")";
  if (dom) n->text.insert(n->text.size() - 1, ",psi=" + num(d.half_angle));
  return wrap(n);
}

HolFunction HolFunction::band_limited(const std::vector<std::pair<double, cplx>>& terms) {
  auto n = fresh(FnKind::BandLimited);
  cplx s0 = 0.0, sinf = 0.0;
  n->text = "bandlimited[";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& [t, c] = terms[i];
    if (!(t >= 0.0)) throw DomainError("band-limited exponents must be >= 0");
    n->atoms.push_back({t, c});
    s0 += c;
    if (t == 0.0) sinf += c;
    n->freq = std::max(n->freq, t);
    if (i) n->text += ",";
    n->text += "(" + num(t) + "," + (c.imag() == 0.0 ? num(c.real()) : cnum(c)) + ")";
  }
  n->text += "]";
  n->f0 = s0;
  n->finf = sinf;
  n->features = {0.0};
  return wrap(n);
}

HolFunction HolFunction::e_delta(double delta) {
  if (!(delta > 0.0)) throw DomainError("e_delta requires delta > 0");
  auto n = fresh(FnKind::EDelta);
  n->p = {delta};
  n->f0 = 1.0;
  n->finf = 0.0;
  n->features = {0.0};
  n->freq = delta;
  n->text = "e_delta(delta=" + num(delta) + ")";
  return wrap(n);
}

HolFunction HolFunction::laplace(const std::vector<std::pair<double, cplx>>& atoms,
                                 const std::vector<ExpPolyTerm>& terms) {
  auto n = fresh(FnKind::LaplaceMeasure);
  n->atoms = atoms;
  n->poly = terms;
  cplx f0 = 0.0, finf = 0.0;
  bool rational = true;
  n->features = {0.0};
  for (const auto& [t, c] : atoms) {
    if (!(t >= 0.0)) throw DomainError("atoms must sit on [0, inf)");
    f0 += c;
    if (t == 0.0) finf += c;
    else rational = false;
    n->freq = std::max(n->freq, t);
  }
  for (const auto& term : terms) {
    if (!(term.rate.real() > 0.0) || !(term.shift >= 0.0)) throw DomainError("density terms need Re rate > 0");
    if (term.shift > 0.0) rational = false;
    n->freq = std::max(n->freq, term.shift);
    cplx u = 1.0 / term.rate, acc = 0.0;
    cplx pw = u;
    for (const auto& c : term.coeffs) {
      acc += c * pw;
      pw *= u;
    }
    f0 += acc;
    n->features.push_back(-term.rate.imag());
  }
  n->f0 = f0;
  n->finf = finf;
  n->green = rational;
  sort_features(n->features);
  n->text = "laplace_measure";
  return wrap(n);
}

HolFunction HolFunction::derivative_of(const HolFunction& f) {
  if (!f.has_second_derivative()) throw Unsupported("second derivative of a derivative is not available");
  auto n = fresh(FnKind::Derivative, f.domain());
  n->kids = {f};
  n->second = false;
  n->bounded = false;
  n->green = f.good_for_green();
  n->features = f.boundary_features();
  n->freq = f.max_frequency();
  n->text = "d(" + f.describe() + ")";
  return wrap(n);
}

// ---------------------------------------------------------------- combinators

HolFunction add(const HolFunction& f, const HolFunction& g) {
  const double ang = std::min(f.domain().half_angle, g.domain().half_angle);
  auto n = fresh(FnKind::Sum, Domain{ang});
  n->kids = {f, g};
  if (f.limit_at_zero() && g.limit_at_zero()) n->f0 = *f.limit_at_zero() + *g.limit_at_zero();
  if (f.limit_at_infinity() && g.limit_at_infinity()) n->finf = *f.limit_at_infinity() + *g.limit_at_infinity();
  n->bounded = f.bounded() && g.bounded();
  n->green = f.good_for_green() && g.good_for_green();
  n->second = f.has_second_derivative() && g.has_second_derivative();
  n->features = f.boundary_features();
  for (double x : g.boundary_features()) n->features.push_back(x);
  sort_features(n->features);
  n->freq = std::max(f.max_frequency(), g.max_frequency());
  n->text = "(" + f.describe() + " + " + g.describe() + ")";
  return wrap(n);
}

HolFunction mul(const HolFunction& f, const HolFunction& g) {
  const double ang = std::min(f.domain().half_angle, g.domain().half_angle);
  auto n = fresh(FnKind::Product, Domain{ang});
  n->kids = {f, g};
  if (f.limit_at_zero() && g.limit_at_zero()) n->f0 = *f.limit_at_zero() * *g.limit_at_zero();
  if (f.limit_at_infinity() && g.limit_at_infinity()) n->finf = *f.limit_at_infinity() * *g.limit_at_infinity();
  n->bounded = f.bounded() && g.bounded();
  n->green = f.good_for_green() && g.good_for_green();
  n->second = f.has_second_derivative() && g.has_second_derivative();
  n->features = f.boundary_features();
  for (double x : g.boundary_features()) n->features.push_back(x);
  sort_features(n->features);
  n->freq = f.max_frequency() + g.max_frequency();
  n->text = f.describe() + " * " + g.describe();
  return wrap(n);
}

HolFunction scalar_mul(cplx c, const HolFunction& f) { return mul(HolFunction::constant(c), f); }

HolFunction arg_scale(const HolFunction& f, double t) {
  if (!(t > 0.0)) throw DomainError("arg_scale requires t > 0");
  auto n = fresh(FnKind::ArgScale, f.domain());
  n->kids = {f};
  n->p = {t};
  n->f0 = f.limit_at_zero();
  n->finf = f.limit_at_infinity();
  n->bounded = f.bounded();
  n->green = f.good_for_green();
  n->second = f.has_second_derivative();
  for (double x : f.boundary_features()) n->features.push_back(x / t);
  sort_features(n->features);
  n->freq = f.max_frequency() * t;
  n->text = "arg_scale(" + f.describe() + ",t=" + num(t) + ")";
  return wrap(n);
}

HolFunction arg_shift(const HolFunction& f, cplx tau) {
  if (!(tau.real() >= 0.0)) throw DomainError("arg_shift requires Re tau >= 0");
  Domain d = f.domain();
  if (tau.imag() != 0.0) {
    if (!f.domain().contains_half_plane()) throw DomainError("complex shift needs a half-plane domain");
    d = Domain::half_plane();
  }
  auto n = fresh(FnKind::ArgShift, d);
  n->kids = {f};
  n->p = {tau};
  if (tau.real() > 0.0) {
    n->f0 = f.jet(tau).v;
  } else if (tau == 0.0) {
    n->f0 = f.limit_at_zero();
  }
  n->finf = f.limit_at_infinity();
  n->bounded = f.bounded();
  n->green = f.good_for_green() && tau.imag() == 0.0;
  n->second = f.has_second_derivative();
  for (double x : f.boundary_features()) n->features.push_back(x - tau.imag());
  n->features.push_back(0.0);
  sort_features(n->features);
  n->freq = f.max_frequency();
  n->text = "arg_shift(" + f.describe() + ",tau=" + cnum(tau) + ")";
  return wrap(n);
}

HolFunction compose_power(const HolFunction& f, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("compose_power requires gamma > 0");
  if (f.kind() == FnKind::Constant) return f;
  const double ang = f.domain().half_angle / gamma;
  if (ang > kPi + kAngleSlack) throw DomainError("rescaled domain exceeds angle pi");
  auto n = fresh(FnKind::ArgPower, Domain{std::min(ang, kPi)});
  n->kids = {f};
  n->p = {gamma};
  n->f0 = f.limit_at_zero();
  n->finf = f.limit_at_infinity();
  n->bounded = f.bounded();
  n->second = f.has_second_derivative();
  n->features = {0.0};
  for (double x : f.boundary_features()) {
    if (x != 0.0) n->features.push_back(std::copysign(std::pow(std::abs(x), 1.0 / gamma), x));
  }
  sort_features(n->features);
  n->text = "arg_power(" + f.describe() + ",gamma=" + num(gamma) + ")";
  return wrap(n);
}

HolFunction arg_invert(const HolFunction& f) {
  auto n = fresh(FnKind::ArgInvert, f.domain());
  n->kids = {f};
  n->f0 = f.limit_at_infinity();
  n->finf = f.limit_at_zero();
  n->bounded = f.bounded();
  n->green = f.good_for_green();
  n->second = f.has_second_derivative();
  n->features = {0.0};
  for (double x : f.boundary_features()) {
    if (x != 0.0) n->features.push_back(-1.0 / x);
  }
  sort_features(n->features);
  n->text = "arg_invert(" + f.describe() + ")";
  return wrap(n);
}

// ---------------------------------------------------------------- evaluation

Jet HolFunction::jet(cplx z) const {
  const Node& n = *node_;
  switch (n.kind) {
    case FnKind::Constant:
      return {n.p[0], 0.0, 0.0};
    case FnKind::Exp: {
      const double t = n.p[0].real();
      const cplx v = std::exp(-t * z);
      return {v, -t * v, t * t * v};
    }
    case FnKind::Resolvent: {
      const cplx r = 1.0 / (n.p[0] + z);
      return {r, -r * r, 2.0 * r * r * r};
    }
    case FnKind::CayleyPower: {
      const int k = n.n;
      if (k == 0) return {1.0, 0.0, 0.0};
      const cplx w = 1.0 / (z + 1.0);
      const cplx u = (z - 1.0) * w;
      const cplx u1 = 2.0 * w * w;
      const cplx u2 = -4.0 * w * w * w;
      const cplx pk2 = k >= 2 ? ipow(u, k - 2) : cplx(0.0);
      const cplx pk1 = k >= 2 ? pk2 * u : cplx(1.0);
      const cplx pk = pk1 * u;
      const cplx d1 = double(k) * pk1 * u1;
      const cplx d2 = double(k) * (k - 1) * pk2 * u1 * u1 + double(k) * pk1 * u2;
      return {pk, d1, d2};
    }
    case FnKind::PhiT: {
      const double t = n.p[0].real();
      const cplx w = 1.0 / (z + 1.0);
      const cplx iz = 1.0 / z;
      const cplx e = std::exp(-t * iz);
      const cplx q = z * w, q1 = w * w, q2 = -2.0 * w * w * w;
      const cplx e1 = t * iz * iz * e;
      const cplx e2 = (-2.0 * t * iz * iz * iz + t * t * iz * iz * iz * iz) * e;
      return {q * e, q1 * e + q * e1, q2 * e + 2.0 * q1 * e1 + q * e2};
    }
    case FnKind::PowerExp: {
      const double nu = n.p[0].real();
      const cplx zn = nu == 0.0 ? cplx(1.0) : std::pow(z, nu);
      const cplx e = std::exp(-z);
      const cplx a1 = nu * zn / z;
      const cplx a2 = nu * (nu - 1.0) * zn / (z * z);
      return {zn * e, (a1 - zn) * e, (a2 - 2.0 * a1 + zn) * e};
    }
    case FnKind::Arccot: {
      const cplx q = 1.0 / (1.0 + z * z);
      return {arccot_value(z), -q, 2.0 * z * q * q};
    }
    case FnKind::ExpArccot: {
      const cplx q = 1.0 / (1.0 + z * z);
      const cplx v = std::exp(arccot_value(z));
      const cplx a1 = -q, a2 = 2.0 * z * q * q;
      return {v, a1 * v, (a2 + a1 * a1) * v};
    }
    case FnKind::SectorExp: {
      const double g = n.p[0].real();
      const cplx lam = n.p[1];
      const cplx w = std::pow(z, g);
      const cplx w1 = g * w / z, w2 = g * (g - 1.0) * w / (z * z);
      const cplx v = std::exp(-lam * w);
      return {v, -lam * w1 * v, (-lam * w2 + lam * lam * w1 * w1) * v};
    }
    case FnKind::BernsteinResolvent: {
      const cplx lam = n.p[0];
      const cplx g = n.bern->value(z), g1 = n.bern->deriv(z), g2 = n.bern->deriv2(z);
      const cplx v = 1.0 / (lam + g);
      return {v, -g1 * v * v, -g2 * v * v + 2.0 * g1 * g1 * v * v * v};
    }
    case FnKind::BandLimited: {
      Jet j{0.0, 0.0, 0.0};
      for (const auto& [t, c] : n.atoms) {
        const cplx e = c * std::exp(-t * z);
        j.v += e;
        j.d1 += -t * e;
        j.d2 += t * t * e;
      }
      return j;
    }
    case FnKind::EDelta: {
      const double d = n.p[0].real();
      const auto f = edelta_profile(d * z);
      return {f[0], d * f[1], d * d * f[2]};
    }
    case FnKind::LaplaceMeasure: {
      Jet j{0.0, 0.0, 0.0};
      for (const auto& [t, c] : n.atoms) {
        const cplx e = c * std::exp(-t * z);
        j.v += e;
        j.d1 += -t * e;
        j.d2 += t * t * e;
      }
      for (const auto& term : n.poly) {
        const cplx u = 1.0 / (z + term.rate);
        const int mm = static_cast<int>(term.coeffs.size());
        cplx r0 = 0.0, r1 = 0.0, r2 = 0.0;
        for (int m = mm - 1; m >= 0; --m) {
          r0 = r0 * u + term.coeffs[m];
          r1 = r1 * u - double(m + 1) * term.coeffs[m];
          r2 = r2 * u + double(m + 1) * double(m + 2) * term.coeffs[m];
        }
        r0 *= u;
        r1 *= u * u;
        r2 *= u * u * u;
        const double tau = term.shift;
        const cplx e = tau == 0.0 ? cplx(1.0) : std::exp(-tau * z);
        j.v += e * r0;
        j.d1 += e * (r1 - tau * r0);
        j.d2 += e * (tau * tau * r0 - 2.0 * tau * r1 + r2);
      }
      return j;
    }
    case FnKind::Sum: {
      const Jet a = n.kids[0].jet(z), b = n.kids[1].jet(z);
      return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2};
    }
    case FnKind::Product: {
      const Jet a = n.kids[0].jet(z), b = n.kids[1].jet(z);
      return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
    }
    case FnKind::ArgScale: {
      const double t = n.p[0].real();
      const Jet a = n.kids[0].jet(t * z);
      return {a.v, t * a.d1, t * t * a.d2};
    }
    case FnKind::ArgShift: {
      return n.kids[0].jet(z + n.p[0]);
    }
    case FnKind::ArgPower: {
      const double g = n.p[0].real();
      const cplx w = std::pow(z, g);
      const cplx w1 = g * w / z, w2 = g * (g - 1.0) * w / (z * z);
      const Jet a = n.kids[0].jet(w);
      return {a.v, a.d1 * w1, a.d2 * w1 * w1 + a.d1 * w2};
    }
    case FnKind::ArgInvert: {
      const cplx iz = 1.0 / z;
      const Jet a = n.kids[0].jet(iz);
      const cplx w1 = -iz * iz, w2 = 2.0 * iz * iz * iz;
      return {a.v, a.d1 * w1, a.d2 * w1 * w1 + a.d1 * w2};
    }
    case FnKind::Derivative: {
      const Jet a = n.kids[0].jet(z);
      return {a.d1, a.d2, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0)};
    }
  }
  return {0.0, 0.0, 0.0};
}

cplx HolFunction::eval(cplx z) const {
  if (!domain().contains(z)) throw DomainError("point outside the open domain of " + describe());
  return jet(z).v;
}

cplx HolFunction::deriv(cplx z) const {
  if (!domain().contains(z)) throw DomainError("point outside the open domain of " + describe());
  return jet(z).d1;
}

cplx HolFunction::eval_closure(cplx z) const {
  if (!domain().contains_closure(z)) throw DomainError("point outside the closed domain of " + describe());
  if (z == 0.0) {
    if (auto l = limit_at_zero()) return *l;
  }
  return jet(z).v;
}

cplx HolFunction::deriv_closure(cplx z) const {
  if (!domain().contains_closure(z)) throw DomainError("point outside the closed domain of " + describe());
  return jet(z).d1;
}

FnKind HolFunction::kind() const { return node_->kind; }
const Domain& HolFunction::domain() const { return node_->domain; }
std::optional<cplx> HolFunction::limit_at_zero() const { return node_->f0; }
std::optional<cplx> HolFunction::limit_at_infinity() const { return node_->finf; }
bool HolFunction::bounded() const { return node_->bounded; }
bool HolFunction::good_for_green() const { return node_->green; }
bool HolFunction::has_second_derivative() const { return node_->second; }
std::vector<double> HolFunction::boundary_features() const { return node_->features; }
double HolFunction::max_frequency() const { return node_->freq; }
std::string HolFunction::describe() const { return node_->text; }
const std::vector<cplx>& HolFunction::params() const { return node_->p; }
int HolFunction::order() const { return node_->n; }
const std::vector<std::pair<double, cplx>>& HolFunction::atoms() const { return node_->atoms; }
const std::vector<ExpPolyTerm>& HolFunction::exp_poly_terms() const { return node_->poly; }
const std::vector<HolFunction>& HolFunction::children() const { return node_->kids; }

// ---------------------------------------------------------------- sectorial limits

SectorialLimits sectorial_limits(const HolFunction& f, double tol) {
  const auto& node = f.node();
  std::call_once(node.probe_once, [&]() {
    const double half = 0.5 * f.domain().half_angle;
    const double rays[3] = {0.0, half, -half};
    for (int k = 0; k < 8; ++k) {
      const double r0 = std::pow(10.0, -(k + 1)), r1 = std::pow(10.0, k + 1);
      for (int j = 0; j < 3; ++j) {
        node.probes.zero[k][j] = f.jet(std::polar(r0, rays[j])).v;
        node.probes.inf[k][j] = f.jet(std::polar(r1, rays[j])).v;
      }
    }
  });
  auto decide = [&](const std::array<std::array<cplx, 3>, 8>& t, std::optional<cplx> exact, const char* where) {
    for (int k = 6; k < 8; ++k) {
      for (int j = 0; j < 3; ++j) {
        if (!std::isfinite(t[k][j].real()) || !std::isfinite(t[k][j].imag())) {
          throw NoLimit(std::string("no sectorial limit at ") + where + " for " + f.describe());
        }
      }
    }
    auto spread = [&](int k) {
      double d = 0.0;
      for (int j = 1; j < 3; ++j) d = std::max(d, std::abs(t[k][j] - t[k][0]));
      return d;
    };
    auto step = [&](int k) { return std::abs(t[k][0] - t[k - 1][0]); };
    // Above tol the discrepancies must at least keep shrinking (slow logarithmic limits pass).
    const double scale = std::max(1.0, std::abs(t[7][0]));
    const bool ray_bad = spread(7) > tol * scale && !(spread(7) < spread(6) && spread(6) < spread(5));
    const bool seq_bad = step(7) > tol * scale && !(step(7) < step(6) && step(6) < step(5));
    if (ray_bad || seq_bad) throw NoLimit(std::string("no sectorial limit at ") + where + " for " + f.describe());
    return exact ? *exact : t[7][0];
  };
  SectorialLimits out;
  out.at_zero = decide(node.probes.zero, f.limit_at_zero(), "0");
  out.at_infinity = decide(node.probes.inf, f.limit_at_infinity(), "infinity");
  return out;
}

}  // namespace opcalc
