#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace opcalc::quad {


struct QuadConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 40;
  double alpha_min = 1e-8;
  double alpha_max = 1e8;
  double beta_max = 1e8;
  int sup_seeds = 64;
  // Contributions decaying slower than this factor per decade count as divergent.
  double divergence_growth_factor = 1.5;

  void validate() const;
  // Per-dyadic-interval ratio at or above which a tail is treated as non-decaying.
  double divergence_ratio() const;
};

void to_json(nlohmann::json& j, const QuadConfig& c);
void from_json(const nlohmann::json& j, QuadConfig& c);

enum class Verdict { Converged, Diverged, Inconclusive };

const char* to_string(Verdict v);

// Diverged dominates Inconclusive, which dominates Converged.
Verdict combine(Verdict a, Verdict b);

template <class T>
struct Bracket {
  T value{};
  double error_est = 0.0;
  Verdict verdict = Verdict::Converged;
  long evaluations = 0;
};

namespace detail {

template <class T>
inline constexpr bool is_eigen_v = std::is_base_of_v<Eigen::EigenBase<T>, T>;

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <class T>
  requires is_eigen_v<T>
double magnitude(const T& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(const std::complex<double>& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}
template <class T>
  requires is_eigen_v<T>
bool all_finite(const T& m) {
  return m.allFinite();
}

// acc += w * x, where an empty Eigen accumulator takes the shape of x.
template <class T>
void accumulate(T& acc, const T& x, double w = 1.0) {
  if constexpr (is_eigen_v<T>) {
    if (acc.size() == 0) {
      acc = w * x;
      return;
    }
    acc += w * x;
  } else {
    acc += w * x;
  }
}

template <class T>
T scaled(const T& x, double w) {
  if constexpr (is_eigen_v<T>) {
    return T(w * x);
  } else {
    return w * x;
  }
}

// 21-point Kronrod nodes (descending, centre last) and weights; 10-point Gauss weights
// belong to the odd-indexed Kronrod nodes.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  T value{};
  double error = 0.0;
  int depth = 0;
};

template <class T, class F>
Panel<T> gk21(F& f, double a, double b, int depth, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T resk = scaled(fc, kWgk[10]);
  T resg = scaled(fc, 0.0);
  double resabs = kWgk[10] * magnitude(fc);
  for (int j = 0; j < 10; ++j) {
    const double x = h * kXgk[j];
    const T f1 = f(c - x);
    const T f2 = f(c + x);
    T s = f1;
    accumulate(s, f2);
    accumulate(resk, s, kWgk[j]);
    if (j % 2 == 1) accumulate(resg, s, kWg[j / 2]);
    resabs += kWgk[j] * (magnitude(f1) + magnitude(f2));
  }
  evals += 21;
  Panel<T> p;
  p.a = a;
  p.b = b;
  p.depth = depth;
  p.value = scaled(resk, h);
  T diff = resk;
  accumulate(diff, resg, -1.0);
  const double raw = magnitude(diff) * std::abs(h);
  resabs *= std::abs(h);
  double err = raw;
  if (resabs > 0.0 && raw > 0.0) err = resabs * std::min(1.0, std::pow(200.0 * raw / resabs, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * resabs);
  if (!all_finite(p.value)) err = std::numeric_limits<double>::infinity();
  p.error = err;
  return p;
}

}  // namespace detail

// Global adaptive Gauss-Kronrod over the panels defined by the sorted breakpoints.
// A negative abs_tol falls back to cfg.abs_tol.
template <class T, class F>
Bracket<T> integrate_panels(F&& f, std::vector<double> pts, const QuadConfig& cfg,
                            double abs_tol = -1.0, long max_panels = 6000) {
  using detail::Panel;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Bracket<T> out;
  if (pts.size() < 2) return out;
  const double atol = abs_tol < 0.0 ? cfg.abs_tol : abs_tol;
  auto worse = [](const Panel<T>& x, const Panel<T>& y) { return x.error < y.error; };
  std::vector<Panel<T>> heap;
  std::vector<Panel<T>> frozen;
  long evals = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    heap.push_back(detail::gk21<T>(f, pts[i], pts[i + 1], 0, evals));
  }
  std::make_heap(heap.begin(), heap.end(), worse);
  T total{};
  double err_total = 0.0;
  auto resum = [&]() {
    total = T{};
    err_total = 0.0;
    for (const auto& p : heap) {
      detail::accumulate(total, p.value);
      err_total += p.error;
    }
    for (const auto& p : frozen) {
      detail::accumulate(total, p.value);
      err_total += p.error;
    }
  };
  resum();
  long iter = 0;
  while (!heap.empty()) {
    const double tol = std::max(atol, cfg.rel_tol * detail::magnitude(total));
    if (err_total <= tol) break;
    if (static_cast<long>(heap.size() + frozen.size()) >= max_panels) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    Panel<T> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    const bool too_narrow = !(mid > worst.a && mid < worst.b) ||
                            (worst.b - worst.a) <= 1e-14 * std::max(std::abs(worst.a), std::abs(worst.b));
    if (worst.depth >= cfg.max_depth || too_narrow || !std::isfinite(worst.error)) {
      frozen.push_back(worst);
      if (!std::isfinite(worst.error)) break;
      continue;
    }
    Panel<T> left = detail::gk21<T>(f, worst.a, mid, worst.depth + 1, evals);
    Panel<T> right = detail::gk21<T>(f, mid, worst.b, worst.depth + 1, evals);
    detail::accumulate(total, worst.value, -1.0);
    detail::accumulate(total, left.value);
    detail::accumulate(total, right.value);
    err_total += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
    if (++iter % 64 == 0) resum();
  }
  // Deterministic final reduction in left-to-right order.
  std::vector<Panel<T>> all = heap;
  all.insert(all.end(), frozen.begin(), frozen.end());
  std::sort(all.begin(), all.end(), [](const Panel<T>& x, const Panel<T>& y) { return x.a < y.a; });
  out.value = T{};
  out.error_est = 0.0;
  for (const auto& p : all) {
    detail::accumulate(out.value, p.value);
    out.error_est += p.error;
  }
  out.evaluations = evals;
  const double tol = std::max(atol, cfg.rel_tol * detail::magnitude(out.value));
  out.verdict = (out.error_est <= tol && detail::all_finite(out.value)) ? Verdict::Converged
                                                                        : Verdict::Inconclusive;
  return out;
}

template <class T, class F>
Bracket<T> integrate_adaptive(F&& f, double a, double b, const QuadConfig& cfg) {
  return integrate_panels<T>(f, {a, b}, cfg);
}

enum class Direction { Up, Down };

template <class T>
struct TailResult {
  T value{};
  double error = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  long evaluations = 0;
  int intervals = 0;
  double last_ratio = 0.0;
};

namespace detail {
inline constexpr int kMinIntervals = 8;
inline constexpr int kMaxExtension = 64;
}  // namespace detail

// Integrates f over [start, inf) (Up) or (0, start] (Down) as a sum over dyadic
// intervals. The nominal range ends at `limit`; beyond it the sum continues only
// while the contributions keep decaying geometrically.
template <class T, class F>
TailResult<T> integrate_dyadic(F& f, double start, Direction dir, double limit, const QuadConfig& cfg,
                               double scale_hint = 0.0) {
  using detail::magnitude;
  TailResult<T> res;
  std::vector<double> mags;
  const double rho_div = cfg.divergence_ratio();
  bool interval_trouble = false;
  int beyond = 0;
  QuadConfig inner = cfg;
  inner.rel_tol = 0.1 * cfg.rel_tol;

  auto ratio = [&](std::size_t j) {
    const double prev = mags[j - 1];
    const double cur = mags[j];
    if (prev > 0.0) return cur / prev;
    return cur > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  auto finish = [&](Verdict v) {
    res.verdict = (v == Verdict::Converged && interval_trouble) ? Verdict::Inconclusive : v;
    res.intervals = static_cast<int>(mags.size());
    res.last_ratio = mags.size() >= 2 ? ratio(mags.size() - 1) : 0.0;
    return res;
  };

  for (int k = 0;; ++k) {
    double lo, hi;
    if (dir == Direction::Up) {
      lo = std::ldexp(start, k);
      hi = 2.0 * lo;
    } else {
      hi = std::ldexp(start, -k);
      lo = 0.5 * hi;
    }
    if (!(hi < 1e300) || !(lo > 1e-300)) return finish(Verdict::Inconclusive);
    const bool past = dir == Direction::Up ? lo >= limit : hi <= limit;
    if (past) ++beyond;

    const double scale = std::max({magnitude(res.value), scale_hint});
    const double floor_tol = std::max(0.02 * cfg.abs_tol, 0.003 * cfg.rel_tol * scale);
    Bracket<T> b = integrate_panels<T>(f, {lo, hi}, inner, floor_tol);
    res.evaluations += b.evaluations;
    if (!detail::all_finite(b.value)) return finish(Verdict::Inconclusive);
    if (b.verdict != Verdict::Converged) interval_trouble = true;
    detail::accumulate(res.value, b.value);
    res.error += b.error_est;
    mags.push_back(magnitude(b.value));
    const std::size_t n = mags.size();
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::max(magnitude(res.value), scale_hint));

    if (static_cast<int>(n) >= detail::kMinIntervals) {
      double rmax = 0.0;
      for (std::size_t j = n - 3; j < n; ++j) rmax = std::max(rmax, ratio(j));
      if (rmax <= 0.8) {
        const double tail = mags.back() * rmax / (1.0 - rmax);
        if (tail <= 0.1 * tol) {
          res.error += tail;
          return finish(Verdict::Converged);
        }
      }
      double lo_r = std::numeric_limits<double>::infinity(), hi_r = 0.0;
      for (std::size_t j = n - 4; j < n; ++j) {
        lo_r = std::min(lo_r, ratio(j));
        hi_r = std::max(hi_r, ratio(j));
      }
      if (std::isfinite(hi_r) && hi_r - lo_r <= 0.02 && hi_r < rho_div) {
        const double r = ratio(n - 1);
        const double r_hi = std::min(hi_r + (hi_r - lo_r), 0.5 * (1.0 + hi_r));
        const double unc = mags.back() * (r_hi / (1.0 - r_hi) - lo_r / (1.0 - lo_r));
        if (unc <= 0.5 * tol) {
          detail::accumulate(res.value, b.value, r / (1.0 - r));
          res.error += unc;
          return finish(Verdict::Converged);
        }
      }
    }
    if (past) {
      if (n >= 6) {
        bool grow = true;
        for (std::size_t j = n - 5; j < n; ++j) grow = grow && ratio(j) >= rho_div;
        bool grow_shifted = true;
        for (std::size_t j = n - 6; j < n - 1; ++j) grow_shifted = grow_shifted && ratio(j) >= rho_div;
        if (grow && grow_shifted) return finish(Verdict::Diverged);
      }
      if (beyond > detail::kMaxExtension) return finish(Verdict::Inconclusive);
    }
  }
}

// Inner integrals of an iterated integral over alpha in (0, inf). An inner result that missed
// its own tolerance spoils the outer verdict only when its error, times alpha (the width of the
// surrounding dyadic interval) and the outer weight, is visible at the outer tolerance.
class InnerTracker {
 public:
  template <class T>
  void note(double alpha, double weight, const Bracket<T>& in) {
    using detail::magnitude;
    const double w = std::abs(alpha * weight);
    scale_ = std::max(scale_, w * magnitude(in.value));
    error_ = std::max(error_, in.error_est);
    if (in.verdict == Verdict::Diverged) hard_ = Verdict::Diverged;
    if (in.verdict != Verdict::Converged) weighted_.push_back(w * in.error_est);
  }
  Verdict verdict(const QuadConfig& cfg) const {
    if (hard_ == Verdict::Diverged) return hard_;
    const double budget = 0.1 * (cfg.rel_tol * scale_ + cfg.abs_tol);
    for (double e : weighted_) {
      if (!(e <= budget)) return Verdict::Inconclusive;
    }
    return Verdict::Converged;
  }
  double max_error() const { return error_; }

 private:
  double scale_ = 0.0;
  double error_ = 0.0;
  Verdict hard_ = Verdict::Converged;
  std::vector<double> weighted_;
};

// Integral over (0, inf) split at `pivot` into two dyadic tails.
template <class T, class F>
Bracket<T> improper_integrate(F&& f, const QuadConfig& cfg, double pivot = 1.0) {
  // Each piece gets part of the error budget so that the sum meets rel_tol.
  QuadConfig part = cfg;
  part.rel_tol = 0.4 * cfg.rel_tol;
  part.abs_tol = 0.4 * cfg.abs_tol;
  TailResult<T> up = integrate_dyadic<T>(f, pivot, Direction::Up, cfg.alpha_max, part);
  TailResult<T> down =
      integrate_dyadic<T>(f, pivot, Direction::Down, cfg.alpha_min, part, detail::magnitude(up.value));
  Bracket<T> out;
  out.value = up.value;
  detail::accumulate(out.value, down.value);
  out.error_est = up.error + down.error;
  out.evaluations = up.evaluations + down.evaluations;
  out.verdict = combine(up.verdict, down.verdict);
  if (out.verdict == Verdict::Converged &&
      out.error_est > cfg.rel_tol * detail::magnitude(out.value) + cfg.abs_tol) {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

// Integral over the real line. Breakpoints cluster geometrically around each centre
// at multiples 4^k of `scale`; the two outer tails are dyadic.
template <class T, class F>
Bracket<T> integrate_real_line(F&& f, const std::vector<double>& centers, double scale,
                               const QuadConfig& cfg) {
  double cmax = 0.0;
  for (double c : centers) cmax = std::max(cmax, std::abs(c));
  const double r0 = std::max({4.0 * cmax, 4.0 * scale, 1e-250});
  std::vector<double> pts{-r0, r0};
  for (double c : centers) {
    pts.push_back(c);
    for (double d = scale; d < 2.0 * r0; d *= 4.0) {
      if (c - d > -r0) pts.push_back(c - d);
      if (c + d < r0) pts.push_back(c + d);
    }
  }
  QuadConfig part = cfg;
  part.rel_tol = 0.3 * cfg.rel_tol;
  part.abs_tol = 0.3 * cfg.abs_tol;
  Bracket<T> core = integrate_panels<T>(f, pts, part);
  const double limit = std::max(cfg.beta_max, r0 * 1024.0);
  const double hint = detail::magnitude(core.value);
  auto neg = [&f](double x) { return f(-x); };
  TailResult<T> up = integrate_dyadic<T>(f, r0, Direction::Up, limit, part, hint);
  TailResult<T> dn = integrate_dyadic<T>(neg, r0, Direction::Up, limit, part, hint);
  Bracket<T> out;
  out.value = core.value;
  detail::accumulate(out.value, up.value);
  detail::accumulate(out.value, dn.value);
  out.error_est = core.error_est + up.error + dn.error;
  out.evaluations = core.evaluations + up.evaluations + dn.evaluations;
  out.verdict = combine(core.verdict, combine(up.verdict, dn.verdict));
  if (out.verdict == Verdict::Converged &&
      out.error_est > cfg.rel_tol * detail::magnitude(out.value) + cfg.abs_tol) {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

namespace detail {

inline std::complex<double> wynn_inverse(const std::complex<double>& d) { return 1.0 / d; }
inline double wynn_inverse(double d) { return 1.0 / d; }

// Wynn epsilon extrapolation of a scalar sequence of partial sums (last even column).
template <class S>
S wynn_scalar(const std::vector<S>& sums) {
  const std::size_t n = sums.size();
  if (n < 3) return sums.back();
  std::vector<S> prev(n, S{}), cur(sums);
  S best = sums.back();
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<S> next(n - k);
    bool ok = true;
    for (std::size_t i = 0; i + k < n; ++i) {
      const S d = cur[i + 1] - cur[i];
      if (magnitude(d) == 0.0 || !all_finite(d)) {
        ok = false;
        break;
      }
      next[i] = (k == 1 ? S{} : prev[i + 1]) + wynn_inverse(d);
    }
    if (!ok) break;
    if (k % 2 == 0) best = next.back();
    prev = cur;
    cur = next;
  }
  return best;
}

template <class T>
T wynn(const std::vector<T>& sums) {
  if constexpr (is_eigen_v<T>) {
    T out = sums.back();
    std::vector<typename T::Scalar> col(sums.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      for (std::size_t k = 0; k < sums.size(); ++k) col[k] = sums[k](i);
      out(i) = wynn_scalar(col);
    }
    return out;
  } else {
    return wynn_scalar(sums);
  }
}

}  // namespace detail

// Integral of f over [start, inf) for integrands oscillating with half period `half_period`:
// partial sums over half-period panels extrapolated by the epsilon algorithm.
template <class T, class F>
TailResult<T> integrate_oscillatory_tail(F& f, double start, double half_period, const QuadConfig& cfg,
                                         double scale_hint = 0.0, int max_panels = 600) {
  using detail::magnitude;
  TailResult<T> res;
  QuadConfig inner = cfg;
  inner.rel_tol = 0.1 * cfg.rel_tol;
  std::vector<T> sums;
  T total{};
  T last{}, before{};
  bool have_last = false, have_before = false;
  bool trouble = false;
  for (int k = 0; k < max_panels; ++k) {
    const double a = start + k * half_period;
    const double scale = std::max(magnitude(total), scale_hint);
    Bracket<T> b = integrate_panels<T>(f, {a, a + half_period}, inner,
                                       std::max(0.02 * cfg.abs_tol, 0.003 * cfg.rel_tol * scale));
    res.evaluations += b.evaluations;
    if (!detail::all_finite(b.value)) return res;
    if (b.verdict != Verdict::Converged) trouble = true;
    res.error += b.error_est;
    detail::accumulate(total, b.value);
    sums.push_back(total);
    if (sums.size() > 40) sums.erase(sums.begin());
    if (k < 6) continue;
    const T est = detail::wynn(sums);
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::max(magnitude(est), scale_hint));
    if (have_before) {
      T d1 = est;
      detail::accumulate(d1, last, -1.0);
      T d2 = est;
      detail::accumulate(d2, before, -1.0);
      const double spread = std::max(magnitude(d1), magnitude(d2));
      if (spread <= 0.1 * tol) {
        res.value = est;
        res.error += spread;
        res.intervals = k + 1;
        res.verdict = trouble ? Verdict::Inconclusive : Verdict::Converged;
        return res;
      }
    }
    before = last;
    have_before = have_last;
    last = est;
    have_last = true;
  }
  res.value = have_last ? last : total;
  res.intervals = max_panels;
  res.verdict = Verdict::Inconclusive;
  return res;
}

// integrate_real_line for integrands carrying oscillating factors of angular frequency up to
// omega; both tails use integrate_oscillatory_tail. omega <= 0 falls back to the dyadic tails.
template <class T, class F>
Bracket<T> integrate_real_line_oscillatory(F&& f, const std::vector<double>& centers, double scale, double omega,
                                           const QuadConfig& cfg) {
  if (!(omega > 0.0)) return integrate_real_line<T>(f, centers, scale, cfg);
  double cmax = 0.0;
  for (double c : centers) cmax = std::max(cmax, std::abs(c));
  const double half = std::numbers::pi / omega;
  const double r0 = std::max({4.0 * cmax, 4.0 * scale, 8.0 * half});
  std::vector<double> pts{-r0, r0};
  for (double c : centers) {
    pts.push_back(c);
    for (double d = scale; d < 2.0 * r0; d *= 4.0) {
      if (c - d > -r0) pts.push_back(c - d);
      if (c + d < r0) pts.push_back(c + d);
    }
  }
  for (double x = -r0 + half; x < r0; x += half) pts.push_back(x);
  QuadConfig part = cfg;
  part.rel_tol = 0.3 * cfg.rel_tol;
  part.abs_tol = 0.3 * cfg.abs_tol;
  Bracket<T> core = integrate_panels<T>(f, pts, part);
  const double hint = detail::magnitude(core.value);
  auto neg = [&f](double x) { return f(-x); };
  TailResult<T> up = integrate_oscillatory_tail<T>(f, r0, half, part, hint);
  TailResult<T> dn = integrate_oscillatory_tail<T>(neg, r0, half, part, hint);
  Bracket<T> out;
  out.value = core.value;
  detail::accumulate(out.value, up.value);
  detail::accumulate(out.value, dn.value);
  out.error_est = core.error_est + up.error + dn.error;
  out.evaluations = core.evaluations + up.evaluations + dn.evaluations;
  out.verdict = combine(core.verdict, combine(up.verdict, dn.verdict));
  if (out.verdict == Verdict::Converged &&
      out.error_est > cfg.rel_tol * detail::magnitude(out.value) + cfg.abs_tol) {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

// Maximum of h over [a, b] by golden-section search, seeded with the best endpoint.
double golden_max(const std::function<double(double)>& h, double a, double b, double* argmax = nullptr);

// Largest value of h over the sorted seed points, refined by golden-section search
// around every discrete local maximum.
double multistart_max(const std::function<double(double)>& h, std::vector<double> seeds,
                      double* argmax = nullptr);

// Seeds of the form +-beta on a log grid plus 0 and the hint neighbourhoods.
std::vector<double> vertical_line_seeds(double alpha, const QuadConfig& cfg, const std::vector<double>& hints);

double sup_on_vertical_line(const std::function<double(double)>& h, double alpha, const QuadConfig& cfg,
                            const std::vector<double>& hints = {});

}  // namespace opcalc::quad
