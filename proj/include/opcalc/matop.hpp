#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "opcalc/holfun.hpp"
#include "opcalc/quad.hpp"

namespace opcalc {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct SpectralCache {
  Vec eigenvalues;
  Mat P;
  Mat P_inv;
  double condition = 1.0;
};

// Dense square matrix with its Schur eigenvalues and, when it is diagonalizable with a usable
// eigenvector basis, the eigendecomposition A = P diag(lambda) P^{-1}.
class MatrixOperator {
 public:
  explicit MatrixOperator(Mat entries, std::string label = "");

  int dim() const { return int(a_.rows()); }
  const Mat& entries() const { return a_; }
  const std::string& label() const { return label_; }
  const Vec& eigenvalues() const { return eigs_; }
  bool diagonalizable() const { return spectral_ != nullptr; }
  bool normal() const { return normal_; }
  // Throws NotDiagonalizable when no eigenbasis is available.
  const SpectralCache& spectral() const;
  double max_abs() const { return a_.cwiseAbs().maxCoeff(); }
  // Largest |arg lambda| over nonzero eigenvalues.
  double spectral_angle() const;

  static MatrixOperator from_spectral(SpectralCache cache, std::string label = "");

 private:
  MatrixOperator() = default;
  Mat a_;
  std::string label_;
  Vec eigs_;
  std::shared_ptr<const SpectralCache> spectral_;
  bool normal_ = false;
};

double op_norm(const Mat& m);

// (z + A)^{-1}; Singular when -z is an eigenvalue.
Mat resolvent(const MatrixOperator& A, cplx z);
// (z + A)^{-p}; non-integer p uses the principal branch on the eigenvalues of z + A.
Mat resolvent_power(const MatrixOperator& A, cplx z, double p);

struct SupResult {
  double value = 0.0;
  bool bounded = true;
};

// sup of ||z (z + A)^{-1}|| over the sector |arg z| < pi - psi (psi = pi/2 gives M_A).
SupResult sectoriality_constant(const MatrixOperator& A, double psi, const quad::QuadConfig& cfg = {});
std::map<double, SupResult> sectoriality_constants(const MatrixOperator& A, const std::vector<double>& psis,
                                                   const quad::QuadConfig& cfg = {});

// sup_{t >= 0} ||e^{-tA}||.
SupResult semigroup_bound(const MatrixOperator& A, const quad::QuadConfig& cfg = {});

struct GsfBracket {
  double lower = 0.0;
  double upper = 0.0;
  quad::Verdict verdict = quad::Verdict::Converged;
  bool satisfied() const { return verdict == quad::Verdict::Converged; }
};

struct GsfOptions {
  int pairs = 200;
  std::uint64_t seed = 20240601;
  double log_alpha_min = -4.0;
  double log_alpha_max = 6.0;
  int points_per_decade = 4;
};

// Bracket for the resolvent integrability constant, scaled by 2/pi so that a positive scalar
// has constant 2 sup_alpha alpha/(alpha + a) = 2:
//   upper = sup_alpha (2/pi) alpha int ||(alpha + i beta + A)^{-2}|| d beta,
//   lower = same with |<(alpha + i beta + A)^{-2} x, y>| maximized over random unit pairs.
GsfBracket gsf_bracket(const MatrixOperator& A, const quad::QuadConfig& cfg = {}, const GsfOptions& opt = {});

// Spectrum in the closed right half-plane with semisimple eigenvalues on the imaginary axis.
bool gsf_structural(const MatrixOperator& A, double tol = 1e-9);

Mat semigroup(const MatrixOperator& A, double t);
// e^{-lambda A} for |arg lambda| < pi/2 - spectral_angle(A).
Mat semigroup(const MatrixOperator& A, cplx lambda);

MatrixOperator fractional_power(const MatrixOperator& A, double gamma);
// arccot(B) = (1/2i) log((B + i)/(B - i)) on the eigenvalues of B.
Mat matrix_arccot(const MatrixOperator& B);

// P diag(f(lambda_i)) P^{-1}; eigenvalues on the domain boundary use the continuous extension.
Mat spectral_apply(const HolFunction& f, const MatrixOperator& A);

// Generators.
MatrixOperator diag_operator(const std::vector<cplx>& d);
MatrixOperator jordan_block(cplx lambda, int n);
// Similarity transform S D S^{-1} of a diagonal with |arg| <= theta and modulus in [0.1, 10].
MatrixOperator random_sectorial(int dim, double theta, std::uint64_t seed);
// Similarity transform of a normal matrix with spectrum in the open right half-plane.
MatrixOperator random_hilbert_contraction_gen(int dim, std::uint64_t seed);

// {"dim": n, "entries": [[re, im], ...]} row-major; also accepts a list of rows of [re, im].
nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

}  // namespace opcalc
