#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>

#include "opcalc/calculi.hpp"
#include "opcalc/errors.hpp"
#include "opcalc/norms.hpp"
#include "opcalc/verify.hpp"

namespace opcalc::verify {

namespace {

using nlohmann::json;
using quad::Verdict;

constexpr double kSlack = 1e-9;

// Shared state of one experiment run.
class Run {
 public:
  Run(Report& r, const json& params, std::uint64_t seed) : r_(r), p_(params), seed_(seed) {}

  std::uint64_t seed(std::uint64_t offset = 0) const { return seed_ + offset; }
  double num(const char* key) const { return p_.at(key).get<double>(); }
  int integer(const char* key) const { return p_.at(key).get<int>(); }
  std::vector<double> list(const char* key) const { return p_.at(key).get<std::vector<double>>(); }

  // measured <= bound; Inconclusive when the inputs were not computed reliably.
  Status le(const std::string& name, double measured, double bound, Source src, bool reliable = true,
            const std::string& detail = "") {
    Claim c{name, measured, bound, "<=", kSlack, src, Status::Pass, detail};
    const bool holds = std::isfinite(measured) && measured <= bound + kSlack * (1.0 + std::abs(bound));
    c.status = !reliable ? Status::Inconclusive : holds ? Status::Pass : Status::Fail;
    r_.claims.push_back(c);
    return c.status;
  }

  // measured >= bound.
  Status ge(const std::string& name, double measured, double bound, Source src, bool reliable = true,
            const std::string& detail = "") {
    Claim c{name, measured, bound, ">=", kSlack, src, Status::Pass, detail};
    const bool holds = std::isfinite(measured) && measured >= bound - kSlack * (1.0 + std::abs(bound));
    c.status = !reliable ? Status::Inconclusive : holds ? Status::Pass : Status::Fail;
    r_.claims.push_back(c);
    return c.status;
  }

  // |measured - expected| <= tol.
  Status close(const std::string& name, double measured, double expected, double tol, Source src, bool reliable = true,
               const std::string& detail = "") {
    Claim c{name, measured, expected, "==", tol, src, Status::Pass, detail};
    const bool holds = std::abs(measured - expected) <= tol;
    c.status = !reliable ? Status::Inconclusive : holds ? Status::Pass : Status::Fail;
    r_.claims.push_back(c);
    return c.status;
  }

  // max/min of positive values <= bound.
  Status spread(const std::string& name, const std::vector<double>& values, double bound, Source src, bool reliable = true) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double s = *lo > 0.0 ? *hi / *lo : INFINITY;
    Claim c{name, s, bound, "spread<=", 0.0, src, Status::Pass, ""};
    c.status = !reliable ? Status::Inconclusive : s <= bound ? Status::Pass : Status::Fail;
    r_.claims.push_back(c);
    return c.status;
  }

  void row(const std::string& series, double param, double measured, double bound, bool pass = true) {
    r_.series.push_back({series, param, measured, bound, pass});
  }
  void row_le(const std::string& series, double param, double measured, double bound) {
    row(series, param, measured, bound, measured <= bound + kSlack * (1.0 + std::abs(bound)));
  }
  void measure(const std::string& name, double v) { r_.measurements.emplace_back(name, v); }

  // Times fn under the given phase name.
  template <class F>
  void phase(const std::string& name, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    r_.timings[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

 private:
  Report& r_;
  const json& p_;
  std::uint64_t seed_;
};

bool converged(const NormReport& n) { return n.value.verdict == Verdict::Converged; }

std::string idx(const std::string& base, int k) { return base + "[" + std::to_string(k) + "]"; }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

Mat cayley_of(const MatrixOperator& A) {
  const Mat I = Mat::Identity(A.dim(), A.dim());
  return (A.entries() - I) * (A.entries() + I).partialPivLu().inverse();
}

// P diag(h(lambda)) P^{-1}.
Mat apply_on_eigenvalues(const MatrixOperator& A, const std::function<cplx(cplx)>& h) {
  const SpectralCache& s = A.spectral();
  Vec d(A.dim());
  for (int i = 0; i < A.dim(); ++i) d(i) = h(s.eigenvalues(i));
  return s.P * d.asDiagonal() * s.P_inv;
}

std::vector<cplx> eigenvalues_of(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  const Vec& e = es.eigenvalues();
  return std::vector<cplx>(e.data(), e.data() + e.size());
}

// Largest distance in a greedy nearest-neighbour matching of two multisets.
double multiset_distance(const std::vector<cplx>& a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (cplx x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

GsfOptions gsf_options(std::uint64_t seed) {
  GsfOptions o;
  o.seed = seed;
  return o;
}

// ---------------------------------------------------------------- experiments

void cayley_powers(Run& run) {
  const int dim = run.integer("dim");
  const int n_max = run.integer("n_max");
  const int count = run.integer("generators");
  const double c1 = 1.0 + 32.0 * (1.0 + 1.0 / (std::sqrt(2.0) * kPi));
  std::vector<double> besov;
  run.phase("besov_norms", [&] {
    for (double n : run.list("norm_ns")) besov.push_back(b0_norm(HolFunction::cayley_power(int(n))).value.value);
  });
  for (int k = 0; k < count; ++k) {
    const MatrixOperator A = random_hilbert_contraction_gen(dim, run.seed(k));
    run.phase("operators", [&] {
      const SupResult M = sectoriality_constant(A, kPi / 2);
      const Mat V = cayley_of(A);
      Mat P = Mat::Identity(dim, dim);
      double worst = 0.0;
      std::vector<double> norms(n_max + 1, 1.0);
      for (int n = 1; n <= n_max; ++n) {
        P = P * V;
        norms[n] = op_norm(P);
        worst = std::max(worst, norms[n]);
      }
      const std::string tag = "g" + std::to_string(k);
      run.measure(idx("sectoriality_constant", k), M.value);
      run.le(idx("max_power_norm_vs_sectorial_bound", k), worst, M.bounded ? c1 * M.value * M.value : INFINITY,
             Source::Stated, M.bounded, "max over n <= " + std::to_string(n_max));
      const GsfBracket g = gsf_bracket(A, {}, gsf_options(run.seed(k)));
      run.measure(idx("gsf_upper", k), g.upper);
      const auto ns = run.list("norm_ns");
      double worst_ratio = 0.0;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        const int n = int(ns[i]);
        const double bound = 1.0 + g.upper * besov[i];
        run.row_le("besov_bound_" + tag, n, n <= n_max ? norms[n] : NAN, bound);
        if (n <= n_max) worst_ratio = std::max(worst_ratio, norms[n] / bound);
      }
      run.le(idx("power_norm_over_besov_bound", k), worst_ratio, 1.0, Source::Stated, g.satisfied(),
             "||V(A)^n|| / (1 + gamma_upper ||V^n||_B0), worst n");
      for (int n = 1; n <= n_max; n *= 2) run.row("power_norm_" + tag, n, norms[n], M.bounded ? c1 * M.value * M.value : INFINITY);
    });
  }
  run.phase("asymptotics", [&] {
    std::vector<double> hp, bn;
    bool ok = true;
    for (double nd : run.list("asym_ns")) {
      const int n = int(nd);
      const double h = hp_power_norm_cayley(n);
      const NormReport b = b_norm(HolFunction::cayley_power(n));
      ok = ok && converged(b);
      hp.push_back(h / std::sqrt(nd));
      bn.push_back(b.value.value / std::log(nd));
      run.row("hp_norm_over_sqrt_n", n, hp.back(), 3.0);
      run.row("besov_norm_over_log_n", n, bn.back(), 4.0);
    }
    run.spread("hp_norm_over_sqrt_n_spread", hp, 3.0, Source::Stated);
    run.spread("besov_norm_over_log_n_spread", bn, 4.0, Source::Stated, ok);
  });
}

void phi_t_asymptotics(Run& run) {
  std::vector<double> by_t, by_sqrt_t, by_log;
  bool ok = true;
  run.phase("norms", [&] {
    for (double t : run.list("ts")) {
      const double hp = phi_hp_norm(t);
      const NormReport b = b_norm(HolFunction::phi(t));
      ok = ok && converged(b);
      by_t.push_back(hp / t);
      by_sqrt_t.push_back(hp / std::sqrt(t));
      by_log.push_back(b.value.value / std::log(t));
      run.row("hp_norm", t, hp, NAN);
      run.row("hp_norm_over_t", t, by_t.back(), 3.0);
      run.row("besov_norm_over_log_t", t, by_log.back(), 4.0);
    }
  });
  run.spread("hp_norm_over_t_spread", by_t, 3.0, Source::Stated);
  run.spread("hp_norm_over_sqrt_t_spread", by_sqrt_t, 3.0, Source::Derived);
  run.spread("besov_norm_over_log_t_spread", by_log, 4.0, Source::Stated, ok);
  // Least-squares slope of log ||phi_t||_HP against log t.
  const auto ts = run.list("ts");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x = std::log(ts[i]), y = std::log(by_t[i] * ts[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = double(ts.size());
  run.measure("hp_norm_growth_exponent", (n * sxy - sx * sy) / (n * sxx - sx * sx));
}

void inverse_generator(Run& run) {
  const int dim = run.integer("dim");
  const auto ts = run.list("ts");
  const auto nus = run.list("nus");
  std::vector<double> b0;
  run.phase("besov_norms", [&] {
    for (double t : ts) b0.push_back(b0_norm(HolFunction::phi(t)).value.value);
  });
  for (int k = 0; k < run.integer("matrices"); ++k) {
    run.phase("operators", [&] {
      const MatrixOperator A = random_sectorial(dim, run.num("theta"), run.seed(k));
      const MatrixOperator Ainv(A.entries().inverse(), "inverse");
      const SupResult M = sectoriality_constant(A, kPi / 2);
      const GsfBracket g = gsf_bracket(A, {}, gsf_options(run.seed(k)));
      const double factor = op_norm(Mat::Identity(dim, dim) + Ainv.entries());
      const std::string tag = "m" + std::to_string(k);
      double worst = 0.0;
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double v = op_norm(semigroup(Ainv, ts[i]));
        const double bound = factor * (1.0 + g.upper * b0[i]);
        run.row_le("inverse_semigroup_" + tag, ts[i], v, bound);
        worst = std::max(worst, v / bound);
        xs.push_back(std::log(std::log(ts[i]) + 1.0));
        ys.push_back(std::log(v));
      }
      run.le(idx("inverse_semigroup_over_log_bound", k), worst, 1.0, Source::Derived, g.satisfied(),
             "||e^{-tA^-1}|| / (||1 + A^-1|| (1 + gamma_upper ||phi_t||_B0)), worst t");
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i], sxx += xs[i] * xs[i], sxy += xs[i] * ys[i];
      const double n = double(xs.size());
      run.measure(idx("log_growth_exponent", k), (n * sxy - sx * sy) / (n * sxx - sx * sx));
      double worst_nu = 0.0;
      for (double nu : nus) {
        const Mat Apow = nu == 0.0 ? Mat::Identity(dim, dim) : fractional_power(Ainv, nu).entries();
        for (double t : ts) {
          const double v = op_norm(Apow * semigroup(Ainv, t));
          const double bound =
              std::pow(2.0, nu + 2) * std::pow(t, -nu) * std::tgamma(nu + 1) * std::pow(M.value, std::ceil(nu) + 2);
          run.row_le("inverse_power_bound_" + tag + "_nu" + fmt(nu), t, v, bound);
          worst_nu = std::max(worst_nu, v / bound);
        }
      }
      run.le(idx("inverse_power_semigroup_over_bound", k), worst_nu, 1.0, Source::Stated, M.bounded,
             "||A^-nu e^{-tA^-1}|| / (2^{nu+2} t^-nu Gamma(nu+1) M^{ceil(nu)+2}), worst (nu, t)");
    });
  }
}

void sectb_constant(Run& run) {
  const double C = 8.0 * (2.0 + std::log(2.0));
  const auto thetas = run.list("thetas");
  int k = 0;
  auto check = [&](const MatrixOperator& A, const std::string& what) {
    run.phase("operators", [&] {
      const SupResult M = sectoriality_constant(A, kPi / 2);
      const GsfBracket g = gsf_bracket(A, {}, gsf_options(run.seed(k)));
      const double bound = M.bounded ? C * M.value * (std::log(M.value) + 1.0) : INFINITY;
      // Pass on the upper estimate; fail only if even the lower estimate exceeds the bound.
      Status st = Status::Inconclusive;
      if (g.satisfied() && g.upper <= bound) st = Status::Pass;
      if (g.lower > bound) st = Status::Fail;
      run.le(idx("gsf_constant_vs_sectorial_bound", k), g.upper, bound, Source::Stated, st != Status::Inconclusive,
             what + ", lower=" + fmt(g.lower) + ", M_A=" + fmt(M.value));
      run.row("gsf_upper", k, g.upper, bound, g.upper <= bound);
      run.row("gsf_lower", k, g.lower, bound, g.lower <= bound);
      ++k;
    });
  };
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    check(random_sectorial(run.integer("dim"), thetas[i], run.seed(i)), "random_sectorial theta=" + fmt(thetas[i]));
  }
  for (int i = 0; i < run.integer("hilbert_generators"); ++i) {
    check(random_hilbert_contraction_gen(run.integer("dim"), run.seed(100 + i)), "random_hilbert_contraction_gen");
  }
}

void cor10_bounds(Run& run) {
  const int dim = run.integer("dim");
  const auto thetas = run.list("thetas");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    run.phase("operators", [&] {
      const MatrixOperator A = random_sectorial(dim, thetas[k], run.seed(k));
      const SupResult M = sectoriality_constant(A, kPi / 2);
      const std::string tag = "m" + std::to_string(k);
      double worst = 0.0;
      for (double nu : run.list("nus")) {
        const Mat Apow = nu == 0.0 ? Mat::Identity(dim, dim) : fractional_power(A, nu).entries();
        for (double t : run.list("ts")) {
          const double v = op_norm(Apow * semigroup(A, t));
          const double bound =
              std::pow(2.0, nu + 2) * std::pow(t, -nu) * std::tgamma(nu + 1) * std::pow(M.value, std::ceil(nu) + 2);
          run.row_le("power_semigroup_" + tag + "_nu" + fmt(nu), t, v, bound);
          worst = std::max(worst, v / bound);
        }
      }
      run.le(idx("power_semigroup_over_bound", k), worst, 1.0, Source::Stated, M.bounded,
             "||A^nu e^{-tA}|| / (2^{nu+2} t^-nu Gamma(nu+1) M^{ceil(nu)+2}), worst (nu, t)");

      // Holomorphic semigroups generated by -A^gamma.
      const double theta = A.spectral_angle();
      double worst_g = 0.0;
      bool reliable = true;
      for (double gamma : run.list("gammas")) {
        if (!(gamma * theta < kPi / 2)) continue;
        const double psi = theta + 0.5 * (kPi / (2.0 * gamma) - theta);
        const SupResult Mpsi = sectoriality_constant(A, psi);
        reliable = reliable && Mpsi.bounded;
        const MatrixOperator Ag = fractional_power(A, gamma);
        const double phimax = kPi / 2 - gamma * psi;
        for (double frac : {-0.5, 0.0, 0.5}) {
          const double phi = frac * phimax;
          for (double r : run.list("lambda_moduli")) {
            const double v = op_norm(semigroup(Ag, std::polar(r, phi)));
            const double bound = 0.5 * (1.0 / std::cos(gamma * psi + phi) + 1.0 / std::cos(gamma * psi - phi)) * Mpsi.value;
            run.row_le("fractional_semigroup_" + tag + "_gamma" + fmt(gamma) + "_phi" + fmt(phi), r, v, bound);
            worst_g = std::max(worst_g, v / bound);
          }
        }
      }
      run.le(idx("fractional_semigroup_over_bound", k), worst_g, 1.0, Source::Stated, reliable,
             "||e^{-lambda A^gamma}|| / (cosine factor * M_psi(A)), worst (gamma, lambda)");
    });
  }
}

// Lower Riemann sum of int_0^inf h(t)/(omega + t) dt, h(t) = sup_{|s| >= t} |f(is)| sampled on a log grid.
double boundary_integral_lower(const HolFunction& f, double omega) {
  std::vector<double> s{0.0};
  for (int k = -240; k <= 320; ++k) s.push_back(std::pow(10.0, k / 40.0));
  std::vector<double> h(s.size());
  double run_max = 0.0;
  for (std::size_t i = s.size(); i-- > 0;) {
    const double v = std::max(std::abs(f.eval_closure(cplx(0.0, s[i]))), std::abs(f.eval_closure(cplx(0.0, -s[i]))));
    run_max = std::max(run_max, v);
    h[i] = run_max;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) sum += h[i + 1] * std::log((omega + s[i + 1]) / (omega + s[i]));
  return sum;
}

void exp_stable_bound(Run& run) {
  const int dim = run.integer("dim");
  const double omega = run.num("omega");
  const std::vector<HolFunction> fs{HolFunction::resolvent(1.0), HolFunction::resolvent(cplx(1.0, 2.0)),
                                    HolFunction::cayley_power(1) * HolFunction::resolvent(1.0),
                                    HolFunction::exp(1.0) * HolFunction::resolvent(2.0)};
  for (int k = 0; k < run.integer("matrices"); ++k) {
    run.phase("operators", [&] {
      const MatrixOperator B = random_sectorial(dim, run.num("theta"), run.seed(k));
      const MatrixOperator A(B.entries() + omega * Mat::Identity(dim, dim), "shifted");
      const SupResult M = semigroup_bound(B);
      run.measure(idx("semigroup_bound", k), M.value);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const double v = op_norm(spectral_apply(fs[i], A));
        const double bound = 6.0 * M.value * M.value * boundary_integral_lower(fs[i], omega);
        run.row_le("exp_stable_m" + std::to_string(k), double(i), v, bound);
        run.le("exp_stable_bound[" + std::to_string(k) + "][" + fs[i].describe() + "]", v, bound, Source::Stated,
               M.bounded);
      }
    });
  }
}

void spectral_mapping(Run& run) {
  const double tol = run.num("tol");
  auto check = [&](const std::string& name, const Mat& fA, const MatrixOperator& A, const HolFunction& f) {
    std::vector<cplx> mapped;
    for (int i = 0; i < A.dim(); ++i) mapped.push_back(f.eval(A.eigenvalues()(i)));
    run.close(name, multiset_distance(eigenvalues_of(fA), mapped), 0.0, tol, Source::Stated);
  };
  run.phase("diagonal", [&] {
    const MatrixOperator D = diag_operator({1.0, 2.0});
    const HolFunction e1 = HolFunction::exp(1.0);
    check("eigs_f(A)[exp(t=1), diag(1,2)]", b_calculus(D, e1).matrix, D, e1);
  });
  const std::vector<HolFunction> bfs{HolFunction::exp(1.0), HolFunction::cayley_power(3), HolFunction::resolvent(1.0),
                                     HolFunction::phi(2.0)};
  for (int k = 0; k < run.integer("matrices"); ++k) {
    run.phase("random", [&] {
      const MatrixOperator A = random_sectorial(2 + k % 4, run.num("theta"), run.seed(k));
      const std::string tag = "[m" + std::to_string(k) + "]";
      for (const auto& f : bfs) check("eigs_B(" + f.describe() + ")" + tag, b_calculus(A, f).matrix, A, f);
      const HolFunction ac = HolFunction::arccot();
      check("eigs_D(arccot)" + tag, d_calculus(A, ac, 1.0).matrix, A, ac);
      const double psi = std::max(A.spectral_angle() + 0.2, kPi / 4);
      const HolFunction se = HolFunction::sector_exp(1.2, 1.0);
      if (1.2 * psi < kPi / 2) check("eigs_H(" + se.describe() + ")" + tag, h_calculus(A, se, psi, HForm::Arccot).matrix, A, se);
    });
  }
}

void short_time(Run& run) {
  CalculusConfig cfg;
  cfg.quad.rel_tol = run.num("rel_tol");
  cfg.quad.abs_tol = 1e-16;
  cfg.verify_preconditions = false;
  const auto ts = run.list("ts");
  struct Case {
    HolFunction f;
    cplx derivative_at_zero;
  };
  const std::vector<Case> cases{{HolFunction::exp(1.0), -1.0},
                                {HolFunction::resolvent(2.0), -0.25},
                                {HolFunction::cayley_power(1), 2.0}};
  for (int k = 0; k < run.integer("matrices"); ++k) {
    const MatrixOperator A = random_sectorial(run.integer("dim"), run.num("theta"), run.seed(k));
    Vec x(A.dim());
    for (int i = 0; i < A.dim(); ++i) x(i) = cplx(1.0 + i, 0.5 * i - 1.0);
    x /= x.norm();
    for (const auto& c : cases) {
      run.phase("quotients", [&] {
        const cplx f0 = *c.f.limit_at_zero();
        std::vector<double> err;
        for (double t : ts) {
          const MatrixOperator tA(t * A.entries(), "scaled");
          const Vec q = (b_calculus(tA, c.f, cfg).matrix * x - f0 * x) / t;
          err.push_back((q - c.derivative_at_zero * (A.entries() * x)).norm());
          run.row("error_" + c.f.describe() + "_m" + std::to_string(k), t, err.back(), NAN);
        }
        double order = INFINITY;
        for (std::size_t i = 1; i < err.size(); ++i) order = std::min(order, std::log(err[i - 1] / err[i]) / std::log(ts[i - 1] / ts[i]));
        run.ge("convergence_order[" + c.f.describe() + "][m" + std::to_string(k) + "]", order, run.num("min_order"),
               Source::Derived, true, "smallest observed order between consecutive t");
      });
    }
  }
}

void reproducing_formulas(Run& run) {
  const double tol = run.num("tol");
  quad::QuadConfig qc;
  qc.rel_tol = run.num("quad_rel_tol");
  CalculusConfig cc;
  cc.quad = qc;
  std::vector<cplx> half_plane_points{{0.5, 0}, {1, 0}, {2, 1}, {1, -3}, {0.1, 0.1},
                                      {5, 0}, {0.3, -2}, {10, 10}, {0.05, 0}, {3, 0.5}};
  std::vector<cplx> sector_points{{0.5, 0}, {1, 0}, {2, 1}, {1, -0.5}, {0.1, 0},
                                  {5, 2}, {0.3, -0.1}, {10, 0}, {3, 2.5}, {0.05, 0.04}};
  // A quadrature result certifies a residual when it converged, or when its error estimate
  // fits well inside the residual budget (cancellation can defeat a purely relative target).
  auto certified = [&](Verdict v, double error_est, cplx want) {
    return v == Verdict::Converged || (v == Verdict::Inconclusive && error_est <= 0.1 * tol * (1.0 + std::abs(want)));
  };
  auto residual = [&](const std::string& name, cplx got, cplx want, bool reliable) {
    const double scale = 1.0 + std::abs(want);
    run.le(name, std::abs(got - want) / scale, tol, Source::Stated, reliable, "relative residual");
  };
  run.phase("besov", [&] {
    const std::vector<HolFunction> fs{HolFunction::resolvent(1.0), HolFunction::exp(1.0), HolFunction::cayley_power(2),
                                      HolFunction::phi(2.0), HolFunction::resolvent(cplx(1.0, 2.0)),
                                      HolFunction::cayley_power(5)};
    for (const auto& f : fs) {
      const HolFunction d = HolFunction::derivative_of(f);
      double worst = 0.0;
      bool ok = true;
      for (cplx z : half_plane_points) {
        const auto q = apply_Q_s(d, 1.0, z, qc);
        ok = ok && certified(q.verdict, q.error_est, f.eval(z));
        worst = std::max(worst, std::abs(value_at_infinity(f) + q.value - f.eval(z)) / (1.0 + std::abs(f.eval(z))));
      }
      run.le("besov_reproducing[" + f.describe() + "]", worst, tol, Source::Stated, ok, "worst relative residual");
    }
  });
  run.phase("ds", [&] {
    const std::vector<std::pair<HolFunction, double>> fs{
        {HolFunction::resolvent(1.0), -0.5}, {HolFunction::cayley_power(2), 0.0}, {HolFunction::arccot(), -0.5},
        {HolFunction::exp_arccot(), 0.0},    {HolFunction::exp(1.0), 0.0},        {HolFunction::power_exp(1.0), 1.0}};
    for (double s : run.list("ss")) {
      for (const auto& [f, smin] : fs) {
        if (!(s > smin)) continue;
        const HolFunction d = HolFunction::derivative_of(f);
        double worst = 0.0;
        bool ok = true;
        for (cplx z : half_plane_points) {
          const auto q = apply_Q_s(d, s, z, qc);
          ok = ok && certified(q.verdict, q.error_est, f.eval(z));
          worst = std::max(worst, std::abs(value_at_infinity(f) + q.value - f.eval(z)) / (1.0 + std::abs(f.eval(z))));
        }
        run.le("ds_reproducing[" + f.describe() + "][s=" + fmt(s) + "]", worst, tol, Source::Stated, ok,
               "worst relative residual");
      }
    }
  });
  const double psi = run.num("psi");
  const std::vector<HolFunction> hfs{HolFunction::resolvent(1.0), HolFunction::sector_exp(1.5, 1.0),
                                     HolFunction::cayley_power(2), HolFunction::resolvent(cplx(1.0, 1.0)),
                                     HolFunction::arccot(), HolFunction::bernstein_resolvent(BernsteinFunction::sqrt(), 1.0)};
  for (HForm form : {HForm::FractionalResolvent, HForm::Arccot}) {
    run.phase(std::string("sector_") + to_string(form), [&] {
      for (const auto& f : hfs) {
        double worst = 0.0;
        bool ok = true;
        for (cplx z : sector_points) {
          const CalculusResult r = h_calculus(diag_operator({z}), f, psi, form, cc);
          ok = ok && certified(r.diagnostics.verdict, r.diagnostics.error_est, f.eval(z));
          worst = std::max(worst, std::abs(r.matrix(0, 0) - f.eval(z)) / (1.0 + std::abs(f.eval(z))));
        }
        run.le(std::string("sector_reproducing_") + to_string(form) + "[" + f.describe() + "]", worst, tol,
               Source::Stated, ok, "worst relative residual, psi=" + fmt(psi));
      }
    });
  }
  run.phase("arccot_example", [&] {
    const HolFunction r1 = HolFunction::resolvent(1.0);
    for (cplx z : {cplx(0.5, 0.0), cplx(1.0, 0.3)}) {
      const CalculusResult r = h_calculus(diag_operator({z}), r1, kPi / 4, HForm::Arccot, cc);
      residual("arccot_form[resolvent(1+0i)][z=" + fmt(z.real()) + "+" + fmt(z.imag()) + "i]", r.matrix(0, 0),
               r1.eval(z), certified(r.diagnostics.verdict, r.diagnostics.error_est, r1.eval(z)));
    }
  });
}

void membership_table(Run& run) {
  struct Row {
    std::string name;
    std::function<NormReport()> norm;
    Membership expected;
  };
  const HolFunction inv_exp = arg_invert(HolFunction::exp(1.0));
  const HolFunction ea = HolFunction::exp_arccot(), ac = HolFunction::arccot(), e1 = HolFunction::exp(1.0);
  const HolFunction fnu = HolFunction::power_exp(1.0);
  // Membership is a finite-or-divergent question; a modest tolerance keeps the slow
  // alpha -> 0 tails within double-precision resolution.
  quad::QuadConfig qc;
  qc.rel_tol = run.num("rel_tol");
  std::vector<Row> rows{
      {"exp(-1/z) in B", [&] { return b0_norm(inv_exp, qc); }, Membership::NotIn},
      {"exp(arccot) in B", [&] { return b0_norm(ea, qc); }, Membership::NotIn},
      {"arccot in B", [&] { return b0_norm(ac, qc); }, Membership::NotIn},
      {"phi_2 in B", [&] { return b0_norm(HolFunction::phi(2.0), qc); }, Membership::In},
      {"exp(-z) in B", [&] { return b0_norm(e1, qc); }, Membership::In},
      {"exp(-z) in D_0", [&] { return ds_norm(e1, 0.0, qc); }, Membership::NotIn},
      {"exp(-z) in D_1", [&] { return ds_norm(e1, 1.0, qc); }, Membership::In},
      {"z e^{-z} in D_0.5", [&] { return ds_norm(fnu, 0.5, qc); }, Membership::NotIn},
      {"z e^{-z} in D_1.5", [&] { return ds_norm(fnu, 1.5, qc); }, Membership::In}};
  for (double s : run.list("exp_arccot_ss"))
    rows.push_back({"exp(arccot) in D_" + fmt(s), [&, s] { return ds_norm(ea, s, qc); }, Membership::In});
  for (double s : run.list("arccot_ss"))
    rows.push_back({"arccot in D_" + fmt(s), [&, s] { return ds_norm(ac, s, qc); }, Membership::In});
  for (const auto& row : rows) {
    run.phase("norms", [&] {
      const NormReport n = row.norm();
      const bool match = n.membership == row.expected;
      run.close(row.name, match ? 1.0 : 0.0, 1.0, 0.0, Source::Stated, n.membership != Membership::Inconclusive,
                std::string("verdict=") + to_string(n.membership) + ", expected=" + to_string(row.expected) +
                    ", value=" + fmt(n.value.value));
    });
  }
}

void bernstein_sectoriality(Run& run) {
  const std::vector<BernsteinFunction> gs{BernsteinFunction::sqrt(), BernsteinFunction::log1p(),
                                          BernsteinFunction::z_over_1pz(), BernsteinFunction::power(0.7)};
  const auto thetas = run.list("thetas");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    run.phase("operators", [&] {
      const MatrixOperator A = random_sectorial(run.integer("dim"), thetas[k], run.seed(k));
      const double theta = A.spectral_angle();
      const double psi = std::min(theta + run.num("angle_margin"), 0.5 * (theta + kPi));
      for (const auto& g : gs) {
        const MatrixOperator gA(apply_on_eigenvalues(A, [&](cplx z) { return g.value(z); }), g.name());
        const SupResult M = sectoriality_constant(gA, psi);
        const std::string tag = "[" + g.name() + "][m" + std::to_string(k) + "]";
        run.le("spectral_angle" + tag, gA.spectral_angle(), theta, Source::Stated);
        run.le("sectoriality_constant_finite" + tag, M.bounded ? M.value : INFINITY, 1e12, Source::Stated, true,
               "psi=" + fmt(psi));
        run.row("sectoriality_constant_" + g.name(), thetas[k], M.value, INFINITY, M.bounded);
      }
    });
  }
}

struct Entry {
  const char* name;
  void (*fn)(Run&);
  const char* defaults;
};

const Entry kExperiments[] = {
    {"cayley_powers", cayley_powers,
     R"({"dim": 6, "n_max": 256, "generators": 3, "norm_ns": [1, 2, 4, 8, 16, 32, 64, 128, 256],
         "asym_ns": [4, 16, 64, 256]})"},
    {"phi_t_asymptotics", phi_t_asymptotics, R"({"ts": [10, 100, 1000, 10000]})"},
    {"inverse_generator", inverse_generator,
     R"({"dim": 4, "theta": 1.2, "matrices": 3, "ts": [3, 10, 100, 1000, 10000], "nus": [0, 0.5, 1, 2]})"},
    {"sectb_constant", sectb_constant, R"({"dim": 4, "thetas": [0.4, 0.8, 1.2, 1.45], "hilbert_generators": 2})"},
    {"cor10_bounds", cor10_bounds,
     R"({"dim": 4, "thetas": [0.6, 1.0, 1.4], "nus": [0, 0.5, 1, 2, 3], "ts": [0.01, 0.1, 1, 10],
         "gammas": [0.5, 1, 1.5], "lambda_moduli": [0.1, 1, 10]})"},
    {"exp_stable_bound", exp_stable_bound, R"({"dim": 4, "theta": 1.2, "omega": 0.5, "matrices": 3})"},
    {"spectral_mapping", spectral_mapping, R"({"matrices": 4, "theta": 1.0, "tol": 1e-6})"},
    {"short_time", short_time,
     R"({"dim": 3, "theta": 1.0, "matrices": 3, "ts": [1e-2, 1e-3, 1e-4], "rel_tol": 1e-9, "min_order": 0.9})"},
    {"reproducing_formulas", reproducing_formulas, R"({"tol": 1e-6, "quad_rel_tol": 1e-7, "ss": [0.5, 1, 2], "psi": 0.7853981633974483})"},
    {"membership_table", membership_table, R"({"rel_tol": 1e-6, "exp_arccot_ss": [0.5, 1], "arccot_ss": [-0.5, 0, 1]})"},
    {"bernstein_sectoriality", bernstein_sectoriality,
     R"({"dim": 4, "thetas": [0.3, 0.8, 1.3], "angle_margin": 0.1})"},
};

const Entry& find(const std::string& name) {
  for (const auto& e : kExperiments)
    if (name == e.name) return e;
  throw UnknownExperiment("unknown experiment '" + name + "'");
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kExperiments) v.push_back(e.name);
    return v;
  }();
  return names;
}

nlohmann::json default_params(const std::string& name) { return nlohmann::json::parse(find(name).defaults); }

Report run(const ExperimentSpec& spec) {
  const Entry& e = find(spec.name);
  json params = default_params(spec.name);
  if (!spec.params.is_null()) {
    if (!spec.params.is_object()) throw DomainError("experiment params must be a JSON object");
    for (const auto& [k, v] : spec.params.items()) {
      if (!params.contains(k)) throw DomainError(spec.name + ": unknown parameter '" + k + "'");
      params[k] = v;
    }
  }
  Report r;
  r.experiment = spec.name;
  r.seed = spec.seed;
  r.params = params;
  Run ctx(r, r.params, spec.seed);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e.fn(ctx);
  } catch (const nlohmann::json::exception& ex) {
    throw DomainError(spec.name + ": bad parameter: " + ex.what());
  }
  r.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!spec.output.empty()) r.write(spec.output);
  return r;
}

}  // namespace opcalc::verify
