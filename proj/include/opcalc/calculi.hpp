#pragma once

#include <optional>
#include <string>

#include "opcalc/holfun.hpp"
#include "opcalc/matop.hpp"
#include "opcalc/measures.hpp"
#include "opcalc/quad.hpp"

namespace opcalc {

enum class CalculusMethod { HP, B, D, H };
enum class HForm { FractionalResolvent, Arccot };

const char* to_string(CalculusMethod m);
const char* to_string(HForm f);

struct CalculusDiagnostics {
  long outer_evaluations = 0;
  long inner_evaluations = 0;
  // Largest error estimate reported by an inner integral.
  double inner_error = 0.0;
  // Truncation radii of the outer and inner integrals.
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double beta_max = 0.0;
  // Error estimate of the returned matrix (entrywise, after the formula's scalar factor).
  double error_est = 0.0;
  quad::Verdict verdict = quad::Verdict::Converged;
};

struct CalculusResult {
  Mat matrix;
  CalculusMethod method = CalculusMethod::B;
  double s = 0.0;    // D only
  double psi = 0.0;  // H only
  HForm form = HForm::FractionalResolvent;
  CalculusDiagnostics diagnostics;
  // ||matrix - spectral_apply(f, A)|| when A is diagonalizable.
  std::optional<double> oracle_gap;

  std::string describe_method() const;
};

struct CalculusConfig {
  quad::QuadConfig quad = [] {
    quad::QuadConfig c;
    c.rel_tol = 1e-6;
    return c;
  }();
  // Run the norm-based admissibility checks before integrating.
  bool verify_preconditions = true;
  double oracle_threshold = 1e-5;
};

// Sum of c_k e^{-t_k A} over the atoms plus the integral of e^{-tA} against the density.
CalculusResult hp_calculus(const MatrixOperator& A, const RadonMeasure& mu, const CalculusConfig& cfg = {});
// Same for a function with a known representing measure (phi_t included).
CalculusResult hp_calculus(const MatrixOperator& A, const HolFunction& f, const CalculusConfig& cfg = {});

// f(inf) - (2/pi) int_0^inf alpha int_R (alpha - i beta + A)^{-2} f'(alpha + i beta) d beta d alpha.
CalculusResult b_calculus(const MatrixOperator& A, const HolFunction& f, const CalculusConfig& cfg = {});

// f(inf) - (2^s/pi) int_0^inf alpha^s int_R f'(alpha + i beta) (alpha - i beta + A)^{-(s+1)} d beta d alpha.
CalculusResult d_calculus(const MatrixOperator& A, const HolFunction& f, double s, const CalculusConfig& cfg = {});

// With gamma = pi / (2 psi):
//   FractionalResolvent: f(inf) - (1/pi) int_0^inf int_R g'(alpha + i beta) (alpha - i beta + A^gamma)^{-1},
//     g(z) = f(z^{1/gamma});
//   Arccot: f(inf) - (2/pi) int_0^inf f_psi'(t) arccot(A^gamma / t^gamma) dt,
//     f_psi(t) = (f(t e^{i psi}) + f(t e^{-i psi})) / 2.
CalculusResult h_calculus(const MatrixOperator& A, const HolFunction& f, double psi, HForm form,
                          const CalculusConfig& cfg = {});

// e^{-t sqrt(A)} as int_0^inf e^{-sA} (t / (2 sqrt(pi))) s^{-3/2} e^{-t^2/(4s)} ds. Only g = sqrt.
Mat subordinate_semigroup(const MatrixOperator& A, const BernsteinFunction& g, double t,
                          const CalculusConfig& cfg = {});

// Value of f at infinity, falling back to the sectorial limit; PreconditionFailed if neither exists.
cplx value_at_infinity(const HolFunction& f);

}  // namespace opcalc
