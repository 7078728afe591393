#pragma once

#include <utility>
#include <vector>

#include "opcalc/holfun.hpp"

namespace opcalc {

// Bounded measure on [0, inf): point masses plus a density made of exponential-polynomial
// pieces (see ExpPolyTerm).
class RadonMeasure {
 public:
  RadonMeasure() = default;
  RadonMeasure(std::vector<std::pair<double, cplx>> atoms, std::vector<ExpPolyTerm> terms);

  static RadonMeasure dirac(double t, cplx c = 1.0);
  // c e^{-a t} dt
  static RadonMeasure exp_decay(cplx a, cplx c = 1.0);
  // c t^m e^{-a t} dt
  static RadonMeasure poly_exp(int m, cplx a, cplx c = 1.0);

  const std::vector<std::pair<double, cplx>>& atoms() const { return atoms_; }
  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  cplx density(double t) const;
  bool real_valued() const;

  RadonMeasure operator+(const RadonMeasure& o) const;
  RadonMeasure operator-(const RadonMeasure& o) const;
  RadonMeasure scaled(cplx c) const;

 private:
  void normalize();
  std::vector<std::pair<double, cplx>> atoms_;
  std::vector<ExpPolyTerm> terms_;
};

HolFunction laplace_transform(const RadonMeasure& mu);

// Total variation sum |c_k| + int |density|.
double hp_norm(const RadonMeasure& mu);

// Throws Unsupported when two density rates are distinct but numerically indistinguishable.
RadonMeasure convolve(const RadonMeasure& mu, const RadonMeasure& nu);
RadonMeasure convolution_power(const RadonMeasure& mu, int n);

// Representing measure of the n-th power of the Cayley transform (z-1)/(z+1).
RadonMeasure cayley_power_measure(int n);

// Total variation of cayley_power_measure(n); Overflow above cap.
double hp_power_norm_cayley(int n, int cap = 256);

// Density G of the representing measure delta_0 + G(s) ds of z/(z+1) e^{-t/z}, evaluated on
// sorted points s >= 0.
std::vector<double> phi_density(double t, const std::vector<double>& s);

// Total variation of the representing measure of z/(z+1) e^{-t/z}.
double phi_hp_norm(double t);

}  // namespace opcalc
