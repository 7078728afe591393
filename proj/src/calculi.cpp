#include "opcalc/calculi.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <sstream>

#include "opcalc/norms.hpp"

namespace opcalc {

using quad::Bracket;
using quad::QuadConfig;
using quad::Verdict;

namespace {

constexpr double kAngleTol = 1e-12;

// Coordinates in which resolvent powers are cheap: the Schur form (upper triangular, any
// matrix, integer powers) or an eigenbasis (diagonal, stored as a column).
class Frame {
 public:
  static Frame schur(const Mat& a) {
    Eigen::ComplexSchur<Mat> cs(a);
    Frame f;
    f.diagonal_ = false;
    f.u_ = cs.matrixU();
    f.u_inv_ = f.u_.adjoint();
    f.t_ = cs.matrixT();
    f.values_ = f.t_.diagonal();
    return f;
  }

  static Frame eigen(const SpectralCache& c, Vec values) {
    Frame f;
    f.diagonal_ = true;
    f.u_ = c.P;
    f.u_inv_ = c.P_inv;
    f.values_ = std::move(values);
    return f;
  }

  int dim() const { return int(values_.size()); }
  const Vec& values() const { return values_; }

  // (w + op)^{-p}; p must be an integer in the Schur frame.
  Mat resolvent_power(cplx w, double p) const {
    const int n = dim();
    if (diagonal_) {
      Mat out(n, 1);
      for (int i = 0; i < n; ++i) out(i, 0) = std::exp(-p * std::log(w + values_(i)));
      return out;
    }
    Mat shifted = t_;
    shifted.diagonal().array() += w;
    const Mat r = shifted.triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
    Mat out = r;
    for (int k = 1; k < int(std::lround(p)); ++k) out = (out * r).eval();
    return out;
  }

  // Elementwise map g(values) in frame coordinates (eigen frame only).
  template <class G>
  Mat map_values(G&& g) const {
    Mat out(dim(), 1);
    for (int i = 0; i < dim(); ++i) out(i, 0) = g(values_(i));
    return out;
  }

  Mat to_standard(const Mat& x) const {
    if (diagonal_) return u_ * x.col(0).asDiagonal() * u_inv_;
    return u_ * x * u_inv_;
  }

  std::vector<double> imag_parts() const {
    std::vector<double> out;
    for (int i = 0; i < dim(); ++i) out.push_back(values_(i).imag());
    return out;
  }

 private:
  bool diagonal_ = false;
  Mat u_, u_inv_, t_;
  Vec values_;
};

struct Integral {
  Mat value;
  CalculusDiagnostics diag;
};

QuadConfig inner_config(const QuadConfig& cfg) {
  QuadConfig c = cfg;
  c.rel_tol = 0.1 * cfg.rel_tol;
  c.abs_tol = 0.1 * cfg.abs_tol;
  return c;
}

// int_0^inf weight(alpha) int_R fprime(alpha + i beta) (alpha - i beta + op)^{-p} d beta d alpha
// in frame coordinates.
Integral resolvent_double_integral(const Frame& fr, const std::function<cplx(cplx)>& fprime, double p,
                                   const std::function<double(double)>& weight, std::vector<double> centers,
                                   double omega, const QuadConfig& cfg) {
  for (double c : fr.imag_parts()) centers.push_back(c);
  if (centers.empty()) centers.push_back(0.0);
  const QuadConfig icfg = inner_config(cfg);
  Integral out;
  quad::InnerTracker tracker;
  auto outer = [&](double a) -> Mat {
    auto h = [&](double b) -> Mat { return fprime(cplx(a, b)) * fr.resolvent_power(cplx(a, -b), p); };
    // Oscillating factors carry e^{-omega alpha}; once that is below rounding they are ignored.
    const double w = omega * a > 36.0 ? 0.0 : omega;
    const Bracket<Mat> in = quad::integrate_real_line_oscillatory<Mat>(h, centers, a, w, icfg);
    out.diag.inner_evaluations += in.evaluations;
    const double wa = weight(a);
    tracker.note(a, wa, in);
    return wa * in.value;
  };
  const Bracket<Mat> b = quad::improper_integrate<Mat>(outer, cfg, 1.0);
  out.value = b.value.size() ? b.value : Mat::Zero(fr.dim(), fr.dim());
  out.diag.outer_evaluations = b.evaluations;
  out.diag.error_est = b.error_est;
  out.diag.inner_error = tracker.max_error();
  out.diag.verdict = quad::combine(b.verdict, tracker.verdict(cfg));
  out.diag.alpha_min = cfg.alpha_min;
  out.diag.alpha_max = cfg.alpha_max;
  out.diag.beta_max = cfg.beta_max;
  return out;
}

void fill_oracle(CalculusResult& r, const HolFunction& f, const MatrixOperator& A) {
  if (!A.diagonalizable()) return;
  try {
    r.oracle_gap = op_norm(r.matrix - spectral_apply(f, A));
  } catch (const Error&) {
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionFailed(what);
}

void require_converged(const NormReport& r, const std::string& what) {
  if (r.value.verdict != Verdict::Converged) {
    throw PreconditionFailed(what + " is " + quad::to_string(r.value.verdict));
  }
}

void require_sect_below_half_pi(const MatrixOperator& A, const QuadConfig& cfg) {
  require(A.spectral_angle() < kPi / 2 - kAngleTol, "operator is not sectorial of angle < pi/2");
  require(sectoriality_constant(A, kPi / 2, cfg).bounded, "sectoriality constant M_A is infinite");
}

std::vector<double> centers_of(const HolFunction& f) { return f.boundary_features(); }

cplx arccot_scalar(cplx w) {
  const cplx i(0.0, 1.0);
  if (std::abs(w - i) < 1e-14 || std::abs(w + i) < 1e-14) throw BranchViolation("arccot argument at +-i");
  return std::log((w + i) / (w - i)) / (2.0 * i);
}

Mat identity(int n) { return Mat::Identity(n, n); }

}  // namespace

const char* to_string(CalculusMethod m) {
  switch (m) {
    case CalculusMethod::HP:
      return "HP";
    case CalculusMethod::B:
      return "B";
    case CalculusMethod::D:
      return "D";
    case CalculusMethod::H:
      return "H";
  }
  return "?";
}

const char* to_string(HForm f) { return f == HForm::Arccot ? "Arccot" : "FractionalResolvent"; }

std::string CalculusResult::describe_method() const {
  std::ostringstream os;
  os << to_string(method);
  if (method == CalculusMethod::D) os << "(" << s << ")";
  if (method == CalculusMethod::H) os << "(" << psi << "," << to_string(form) << ")";
  return os.str();
}

cplx value_at_infinity(const HolFunction& f) {
  if (auto l = f.limit_at_infinity()) return *l;
  try {
    return sectorial_limits(f).at_infinity;
  } catch (const NoLimit& e) {
    throw PreconditionFailed(std::string("f(inf) does not exist: ") + e.what());
  }
}

// ---------------------------------------------------------------- HP

namespace {

// int_0^inf e^{-(shift + u) A} density(u) du.
Bracket<Mat> semigroup_integral(const MatrixOperator& A, double shift, const std::function<cplx(double)>& density,
                                const QuadConfig& cfg) {
  auto h = [&](double u) -> Mat { return density(u) * semigroup(A, shift + u); };
  return quad::improper_integrate<Mat>(h, cfg, 1.0);
}

CalculusResult hp_from_parts(const MatrixOperator& A, const std::vector<std::pair<double, cplx>>& atoms,
                             const std::vector<std::pair<double, std::function<cplx(double)>>>& densities,
                             const CalculusConfig& cfg) {
  if (cfg.verify_preconditions) {
    require(semigroup_bound(A, cfg.quad).bounded, "semigroup generated by -A is unbounded");
  }
  const int n = A.dim();
  CalculusResult r;
  r.method = CalculusMethod::HP;
  r.matrix = Mat::Zero(n, n);
  for (const auto& [t, c] : atoms) r.matrix += c * semigroup(A, t);
  r.diagnostics.alpha_min = cfg.quad.alpha_min;
  r.diagnostics.alpha_max = cfg.quad.alpha_max;
  for (const auto& [shift, density] : densities) {
    const Bracket<Mat> b = semigroup_integral(A, shift, density, cfg.quad);
    if (b.value.size()) r.matrix += b.value;
    r.diagnostics.outer_evaluations += b.evaluations;
    r.diagnostics.error_est += b.error_est;
    r.diagnostics.verdict = quad::combine(r.diagnostics.verdict, b.verdict);
  }
  return r;
}

}  // namespace

CalculusResult hp_calculus(const MatrixOperator& A, const RadonMeasure& mu, const CalculusConfig& cfg) {
  std::vector<std::pair<double, std::function<cplx(double)>>> densities;
  for (const ExpPolyTerm& term : mu.terms()) {
    densities.push_back({term.shift, [term](double u) {
                           cplx poly = 0.0;
                           double power = 1.0;
                           for (std::size_t m = 0; m < term.coeffs.size(); ++m) {
                             poly += term.coeffs[m] * power;
                             power *= u / double(m + 1);
                           }
                           return poly * std::exp(-term.rate * u);
                         }});
  }
  CalculusResult r = hp_from_parts(A, mu.atoms(), densities, cfg);
  fill_oracle(r, laplace_transform(mu), A);
  return r;
}

CalculusResult hp_calculus(const MatrixOperator& A, const HolFunction& f, const CalculusConfig& cfg) {
  if (f.kind() == FnKind::PhiT) {
    const double t = f.params()[0].real();
    std::vector<std::pair<double, std::function<cplx(double)>>> densities{
        {0.0, [t](double s) { return cplx(phi_density(t, {s})[0]); }}};
    CalculusResult r = hp_from_parts(A, {{0.0, 1.0}}, densities, cfg);
    fill_oracle(r, f, A);
    return r;
  }
  const std::optional<RadonMeasure> mu = representing_measure(f);
  if (!mu) throw PreconditionFailed("no representing measure is known for " + f.describe());
  CalculusResult r = hp_calculus(A, *mu, cfg);
  r.oracle_gap.reset();
  fill_oracle(r, f, A);
  return r;
}

// ---------------------------------------------------------------- B

CalculusResult b_calculus(const MatrixOperator& A, const HolFunction& f, const CalculusConfig& cfg) {
  require(f.domain().contains_half_plane(), "b_calculus needs a function on the right half-plane");
  require(gsf_structural(A), "operator does not satisfy the GSF condition");
  if (cfg.verify_preconditions) require_converged(b0_norm(f, cfg.quad), "b0 norm of " + f.describe());
  const cplx f_inf = value_at_infinity(f);
  const Frame fr = Frame::schur(A.entries());
  const Integral in = resolvent_double_integral(
      fr, [&f](cplx z) { return f.jet(z).d1; }, 2.0, [](double a) { return a; }, centers_of(f), f.max_frequency(),
      cfg.quad);
  CalculusResult r;
  r.method = CalculusMethod::B;
  r.matrix = f_inf * identity(A.dim()) - (2.0 / kPi) * fr.to_standard(in.value);
  r.diagnostics = in.diag;
  r.diagnostics.error_est *= 2.0 / kPi;
  fill_oracle(r, f, A);
  return r;
}

// ---------------------------------------------------------------- D

CalculusResult d_calculus(const MatrixOperator& A, const HolFunction& f, double s, const CalculusConfig& cfg) {
  if (!(s > -1.0)) throw DomainError("d_calculus requires s > -1");
  require(f.domain().contains_half_plane(), "d_calculus needs a function on the right half-plane");
  require_sect_below_half_pi(A, cfg.quad);
  if (cfg.verify_preconditions) require_converged(ds_norm(f, s, cfg.quad), "Ds norm of " + f.describe());
  const cplx f_inf = value_at_infinity(f);
  const double p = s + 1.0;
  const bool integral_power = std::abs(p - std::round(p)) < 1e-12;
  const Frame fr = integral_power ? Frame::schur(A.entries()) : Frame::eigen(A.spectral(), A.eigenvalues());
  const Integral in = resolvent_double_integral(
      fr, [&f](cplx z) { return f.jet(z).d1; }, integral_power ? std::round(p) : p,
      [s](double a) { return s == 0.0 ? 1.0 : std::pow(a, s); }, centers_of(f), f.max_frequency(), cfg.quad);
  const double factor = std::pow(2.0, s) / kPi;
  CalculusResult r;
  r.method = CalculusMethod::D;
  r.s = s;
  r.matrix = f_inf * identity(A.dim()) - factor * fr.to_standard(in.value);
  r.diagnostics = in.diag;
  r.diagnostics.error_est *= factor;
  fill_oracle(r, f, A);
  return r;
}

// ---------------------------------------------------------------- H

CalculusResult h_calculus(const MatrixOperator& A, const HolFunction& f, double psi, HForm form,
                          const CalculusConfig& cfg) {
  if (!(psi > 0.0 && psi < kPi)) throw DomainError("sector angle must lie in (0, pi)");
  require(f.domain().half_angle >= psi - kAngleTol, "f is not defined on the sector");
  require(A.spectral_angle() < psi - kAngleTol, "spectrum of A leaves the sector");
  require(sectoriality_constant(A, psi, cfg.quad).bounded, "M_psi(A) is infinite");
  if (cfg.verify_preconditions) require_converged(hpsi_norm(f, psi, cfg.quad), "Hpsi norm of " + f.describe());
  const cplx f_inf = value_at_infinity(f);
  const SpectralCache& sc = A.spectral();
  const double gamma = kPi / (2.0 * psi);
  Vec powered = sc.eigenvalues;
  for (Eigen::Index i = 0; i < powered.size(); ++i) {
    powered(i) = powered(i) == cplx(0.0) ? cplx(0.0) : std::exp(gamma * std::log(powered(i)));
  }
  const Frame fr = Frame::eigen(sc, powered);
  CalculusResult r;
  r.method = CalculusMethod::H;
  r.psi = psi;
  r.form = form;
  if (form == HForm::FractionalResolvent) {
    // g(z) = f(z^{1/gamma}) on the half-plane.
    const double inv = 1.0 / gamma;
    auto gprime = [&f, inv](cplx z) {
      const cplx w = std::exp(inv * std::log(z));
      return f.jet(w).d1 * inv * w / z;
    };
    std::vector<double> centers{0.0};
    for (double x : f.boundary_features()) {
      if (x != 0.0) centers.push_back(std::copysign(std::pow(std::abs(x), gamma), x));
    }
    const double omega = std::abs(gamma - 1.0) < 1e-12 ? f.max_frequency() : 0.0;
    const Integral in = resolvent_double_integral(
        fr, gprime, 1.0, [](double) { return 1.0; }, centers, omega, cfg.quad);
    r.matrix = f_inf * identity(A.dim()) - (1.0 / kPi) * fr.to_standard(in.value);
    r.diagnostics = in.diag;
    r.diagnostics.error_est /= kPi;
  } else {
    const cplx e = std::polar(1.0, psi);
    auto fpsi_prime = [&f, e](double t) {
      return 0.5 * (e * f.jet(t * e).d1 + std::conj(e) * f.jet(t * std::conj(e)).d1);
    };
    auto h = [&](double t) -> Mat {
      const double tg = std::pow(t, gamma);
      const cplx d = fpsi_prime(t);
      return fr.map_values([&](cplx l) { return d * arccot_scalar(l / tg); });
    };
    const Bracket<Mat> b = quad::improper_integrate<Mat>(h, cfg.quad, 1.0);
    const Mat v = b.value.size() ? b.value : Mat::Zero(A.dim(), 1);
    r.matrix = f_inf * identity(A.dim()) - (2.0 / kPi) * fr.to_standard(v);
    r.diagnostics.outer_evaluations = b.evaluations;
    r.diagnostics.error_est = 2.0 / kPi * b.error_est;
    r.diagnostics.verdict = b.verdict;
    r.diagnostics.alpha_min = cfg.quad.alpha_min;
    r.diagnostics.alpha_max = cfg.quad.alpha_max;
  }
  fill_oracle(r, f, A);
  return r;
}

// ---------------------------------------------------------------- subordination

Mat subordinate_semigroup(const MatrixOperator& A, const BernsteinFunction& g, double t, const CalculusConfig& cfg) {
  if (g.kind() != BernsteinKind::Sqrt) throw Unsupported("subordination density is only available for sqrt");
  if (!(t > 0.0)) throw DomainError("subordination time must be positive");
  if (cfg.verify_preconditions) {
    require(semigroup_bound(A, cfg.quad).bounded, "semigroup generated by -A is unbounded");
  }
  const double c = t / (2.0 * std::sqrt(kPi));
  auto density = [c, t](double s) { return c * std::pow(s, -1.5) * std::exp(-t * t / (4.0 * s)); };
  const double pivot = t * t / 6.0;
  QuadConfig q = cfg.quad;
  q.alpha_min = std::min(q.alpha_min, 1e-4 * pivot);
  auto h = [&](double s) -> Mat { return density(s) * semigroup(A, s); };
  const Bracket<Mat> b = quad::improper_integrate<Mat>(h, q, pivot);
  return b.value.size() ? b.value : Mat::Zero(A.dim(), A.dim());
}

}  // namespace opcalc
