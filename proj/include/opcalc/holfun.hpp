#pragma once

#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opcalc/errors.hpp"

namespace opcalc {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// Open sector |arg z| < half_angle; half_angle = pi/2 is the right half-plane.
struct Domain {
  double half_angle = kPi / 2;

  static Domain half_plane() { return Domain{kPi / 2}; }
  static Domain sector(double psi);

  bool is_half_plane() const;
  bool contains_half_plane() const;
  bool contains(cplx z) const;
  bool contains_closure(cplx z) const;
  std::string describe() const;
};

enum class BernsteinKind { Sqrt, Power, Log1p, ZOver1pZ };

class BernsteinFunction {
 public:
  static BernsteinFunction sqrt();
  static BernsteinFunction power(double exponent);
  static BernsteinFunction log1p();
  static BernsteinFunction z_over_1pz();

  BernsteinKind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  cplx value(cplx z) const;
  cplx deriv(cplx z) const;
  cplx deriv2(cplx z) const;
  cplx at_zero() const { return 0.0; }
  // Empty when g is unbounded at infinity.
  std::optional<cplx> at_infinity() const;
  std::string name() const;

 private:
  BernsteinFunction(BernsteinKind k, double e) : kind_(k), exponent_(e) {}
  BernsteinKind kind_;
  double exponent_;
};

// Value with first and second derivative.
struct Jet {
  cplx v;
  cplx d1;
  cplx d2;
};

enum class FnKind {
  Exp,
  Resolvent,
  CayleyPower,
  PhiT,
  PowerExp,
  Arccot,
  ExpArccot,
  SectorExp,
  BernsteinResolvent,
  BandLimited,
  EDelta,
  LaplaceMeasure,
  Constant,
  Sum,
  Product,
  ArgScale,
  ArgShift,
  ArgPower,
  ArgInvert,
  Derivative
};

// Exponential-polynomial piece e^{-shift z} sum_m coeffs[m] (z + rate)^{-(m+1)}, the Laplace
// transform of sum_m coeffs[m] (t-shift)^m/m! e^{-rate (t-shift)} on t >= shift.
struct ExpPolyTerm {
  double shift = 0.0;
  cplx rate = 1.0;
  std::vector<cplx> coeffs;
};

struct SectorialLimits {
  cplx at_zero;
  cplx at_infinity;
};

class HolFunction {
 public:
  struct Node;

  HolFunction();

  static HolFunction exp(double t);
  static HolFunction resolvent(cplx lambda, std::optional<Domain> dom = std::nullopt);
  static HolFunction cayley_power(int n);
  static HolFunction phi(double t);
  static HolFunction power_exp(double nu);
  static HolFunction arccot();
  static HolFunction exp_arccot();
  static HolFunction sector_exp(double gamma, cplx lambda, std::optional<Domain> dom = std::nullopt);
  static HolFunction bernstein_resolvent(const BernsteinFunction& g, cplx lambda,
                                         std::optional<Domain> dom = std::nullopt);
  static HolFunction band_limited(const std::vector<std::pair<double, cplx>>& terms);
  static HolFunction e_delta(double delta);
  static HolFunction constant(cplx c);
  static HolFunction laplace(const std::vector<std::pair<double, cplx>>& atoms,
                             const std::vector<ExpPolyTerm>& terms);
  // f' as a function in its own right; its second derivative is unavailable.
  static HolFunction derivative_of(const HolFunction& f);

  cplx eval(cplx z) const;
  cplx deriv(cplx z) const;
  // Continuous extension to the closed domain (boundary rays and 0 included).
  cplx eval_closure(cplx z) const;
  cplx deriv_closure(cplx z) const;
  // Catalog formula with no domain check.
  Jet jet(cplx z) const;

  FnKind kind() const;
  const Domain& domain() const;
  std::optional<cplx> limit_at_zero() const;
  std::optional<cplx> limit_at_infinity() const;
  bool bounded() const;
  bool good_for_green() const;
  bool has_second_derivative() const;
  // Imaginary parts of the points of the imaginary axis near which f or f' varies rapidly.
  std::vector<double> boundary_features() const;
  // Largest exponential rate t in e^{-tz} components (oscillation speed on the boundary).
  double max_frequency() const;
  std::string describe() const;
  // Numeric catalog parameters (t, lambda, nu, gamma, ...) in constructor order.
  const std::vector<cplx>& params() const;
  // Integer parameter (the Cayley power).
  int order() const;
  const std::vector<std::pair<double, cplx>>& atoms() const;
  const std::vector<ExpPolyTerm>& exp_poly_terms() const;
  const Node& node() const { return *node_; }
  const std::vector<HolFunction>& children() const;

  explicit HolFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<const Node> node_;
};

HolFunction add(const HolFunction& f, const HolFunction& g);
HolFunction mul(const HolFunction& f, const HolFunction& g);
HolFunction scalar_mul(cplx c, const HolFunction& f);
HolFunction arg_scale(const HolFunction& f, double t);
HolFunction arg_shift(const HolFunction& f, cplx tau);
HolFunction compose_power(const HolFunction& f, double gamma);
HolFunction arg_invert(const HolFunction& f);

inline HolFunction operator+(const HolFunction& f, const HolFunction& g) { return add(f, g); }
inline HolFunction operator-(const HolFunction& f, const HolFunction& g) { return add(f, scalar_mul(-1.0, g)); }
inline HolFunction operator*(const HolFunction& f, const HolFunction& g) { return mul(f, g); }
inline HolFunction operator*(cplx c, const HolFunction& f) { return scalar_mul(c, f); }

// Limits at 0 and infinity probed along the rays arg z in {0, +-psi/2}; throws NoLimit when
// the rays disagree beyond tol at the extreme radii without shrinking.
SectorialLimits sectorial_limits(const HolFunction& f, double tol = 1e-6);

// Integer power by repeated squaring.
cplx ipow(cplx z, int n);

}  // namespace opcalc
