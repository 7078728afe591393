#include "opcalc/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <math.h>

#include "opcalc/quad.hpp"

namespace opcalc {

namespace {

bool is_zero(cplx c) { return c == cplx(0.0); }

// Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double r = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = r;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (r * p1 - p0) / (r * r - 1.0);
        const double step = p1 / dp;
        r -= step;
        if (std::abs(step) < 1e-16) break;
      }
      x[n - 1 - i] = r;
      w[n - 1 - i] = 2.0 / ((1.0 - r * r) * dp * dp);
    }
  }
};

const GaussLegendre& gl8() {
  static const GaussLegendre g(8);
  return g;
}
const GaussLegendre& gl16() {
  static const GaussLegendre g(16);
  return g;
}

// Root of a sign-changing continuous function on [a, b] by the Illinois variant of regula falsi.
template <class F>
double illinois_root(F&& f, double a, double fa, double b, double fb) {
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    if (!(c > a && c < b)) return 0.5 * (a + b);
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (b - a <= 1e-15 * std::max(1.0, std::abs(a))) break;
  }
  return 0.5 * (a + b);
}

// Roots of f on [a, b], scanning n points uniform in sqrt(t - a).
template <class F>
std::vector<double> sign_changes(F&& f, double a, double b, int n) {
  std::vector<double> roots;
  double prev_t = a, prev_f = f(a);
  const double span = std::sqrt(b - a);
  for (int i = 1; i <= n; ++i) {
    const double v = span * i / n;
    const double t = (i == n) ? b : a + v * v;
    const double ft = f(t);
    if (ft == 0.0) {
      roots.push_back(t);
    } else if (prev_f != 0.0 && (ft > 0) != (prev_f > 0)) {
      roots.push_back(illinois_root(f, prev_t, prev_f, t, ft));
    }
    prev_t = t;
    prev_f = ft;
  }
  return roots;
}

quad::QuadConfig tight_config() {
  quad::QuadConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-15;
  return cfg;
}

// Sum of |int f| over consecutive sign-definite pieces.
template <class F>
double piecewise_abs_integral(F&& f, const std::vector<double>& pts) {
  const auto cfg = tight_config();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    total += std::abs(quad::integrate_adaptive<double>(f, pts[i], pts[i + 1], cfg).value);
  }
  return total;
}

// Partial fractions of (z+a)^{-p} (z+b)^{-q}: coefficients of (z+a)^{-k}, k = 1..p, then
// (z+b)^{-k}, k = 1..q.
std::pair<std::vector<cplx>, std::vector<cplx>> partial_fractions(cplx a, cplx b, int p, int q) {
  const cplx d = b - a;
  std::vector<cplx> A(p), B(q);
  auto binom = [](int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); };
  for (int k = 1; k <= p; ++k) {
    const double sgn = ((p - k) % 2 == 0) ? 1.0 : -1.0;
    A[k - 1] = sgn * std::round(binom(p + q - k - 1, p - k)) / ipow(d, p + q - k);
  }
  for (int k = 1; k <= q; ++k) {
    const double sgn = ((q - k) % 2 == 0) ? 1.0 : -1.0;
    B[k - 1] = sgn * std::round(binom(p + q - k - 1, q - k)) / ipow(-d, p + q - k);
  }
  return {A, B};
}

ExpPolyTerm convolve_terms(const ExpPolyTerm& x, const ExpPolyTerm& y, std::vector<ExpPolyTerm>& extra) {
  ExpPolyTerm out;
  out.shift = x.shift + y.shift;
  out.rate = x.rate;
  if (x.rate == y.rate) {
    out.coeffs.assign(x.coeffs.size() + y.coeffs.size(), 0.0);
    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
      for (std::size_t j = 0; j < y.coeffs.size(); ++j) out.coeffs[i + j + 1] += x.coeffs[i] * y.coeffs[j];
    return out;
  }
  const double gap = std::abs(x.rate - y.rate);
  if (gap < 1e-8 * std::max({1.0, std::abs(x.rate), std::abs(y.rate)}))
    throw Unsupported("convolution of nearly equal but distinct exponential rates");
  ExpPolyTerm other;
  other.shift = out.shift;
  other.rate = y.rate;
  out.coeffs.assign(x.coeffs.size() + y.coeffs.size(), 0.0);
  other.coeffs.assign(x.coeffs.size() + y.coeffs.size(), 0.0);
  for (std::size_t i = 0; i < x.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < y.coeffs.size(); ++j) {
      const cplx c = x.coeffs[i] * y.coeffs[j];
      if (is_zero(c)) continue;
      auto [A, B] = partial_fractions(x.rate, y.rate, int(i) + 1, int(j) + 1);
      for (std::size_t k = 0; k < A.size(); ++k) out.coeffs[k] += c * A[k];
      for (std::size_t k = 0; k < B.size(); ++k) other.coeffs[k] += c * B[k];
    }
  }
  extra.push_back(other);
  return out;
}

}  // namespace

RadonMeasure::RadonMeasure(std::vector<std::pair<double, cplx>> atoms, std::vector<ExpPolyTerm> terms)
    : atoms_(std::move(atoms)), terms_(std::move(terms)) {
  for (const auto& [t, c] : atoms_) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("atom position must be finite and nonnegative");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("atom weight must be finite");
  }
  for (const auto& term : terms_) {
    if (!(term.shift >= 0.0) || !std::isfinite(term.shift)) throw DomainError("density shift must be nonnegative");
    bool nonzero = std::any_of(term.coeffs.begin(), term.coeffs.end(), [](cplx c) { return !is_zero(c); });
    if (nonzero && !(term.rate.real() > 0.0)) throw DomainError("density rate must have positive real part");
  }
  normalize();
}

RadonMeasure RadonMeasure::dirac(double t, cplx c) { return RadonMeasure({{t, c}}, {}); }

RadonMeasure RadonMeasure::exp_decay(cplx a, cplx c) { return RadonMeasure({}, {ExpPolyTerm{0.0, a, {c}}}); }

RadonMeasure RadonMeasure::poly_exp(int m, cplx a, cplx c) {
  if (m < 0) throw DomainError("poly_exp degree must be nonnegative");
  std::vector<cplx> coeffs(m + 1, 0.0);
  coeffs[m] = c * std::tgamma(m + 1.0);
  return RadonMeasure({}, {ExpPolyTerm{0.0, a, coeffs}});
}

void RadonMeasure::normalize() {
  std::map<double, cplx> am;
  for (const auto& [t, c] : atoms_) am[t] += c;
  atoms_.clear();
  for (const auto& [t, c] : am)
    if (!is_zero(c)) atoms_.emplace_back(t, c);

  std::vector<ExpPolyTerm> merged;
  for (const auto& term : terms_) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const ExpPolyTerm& m) { return m.shift == term.shift && m.rate == term.rate; });
    if (it == merged.end()) {
      merged.push_back(term);
      continue;
    }
    if (it->coeffs.size() < term.coeffs.size()) it->coeffs.resize(term.coeffs.size(), 0.0);
    for (std::size_t m = 0; m < term.coeffs.size(); ++m) it->coeffs[m] += term.coeffs[m];
  }
  terms_.clear();
  for (auto& term : merged) {
    while (!term.coeffs.empty() && is_zero(term.coeffs.back())) term.coeffs.pop_back();
    if (!term.coeffs.empty()) terms_.push_back(std::move(term));
  }
  std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& x, const ExpPolyTerm& y) {
    if (x.shift != y.shift) return x.shift < y.shift;
    if (x.rate.real() != y.rate.real()) return x.rate.real() < y.rate.real();
    return x.rate.imag() < y.rate.imag();
  });
}

cplx RadonMeasure::density(double t) const {
  cplx sum = 0.0;
  for (const auto& term : terms_) {
    if (t < term.shift) continue;
    const double u = t - term.shift;
    cplx basis = std::exp(-term.rate * u);
    for (std::size_t m = 0; m < term.coeffs.size(); ++m) {
      if (m > 0) basis *= u / double(m);
      sum += term.coeffs[m] * basis;
    }
  }
  return sum;
}

bool RadonMeasure::real_valued() const {
  for (const auto& term : terms_) {
    if (term.rate.imag() != 0.0) return false;
    for (cplx c : term.coeffs)
      if (c.imag() != 0.0) return false;
  }
  return true;
}

RadonMeasure RadonMeasure::operator+(const RadonMeasure& o) const {
  auto atoms = atoms_;
  atoms.insert(atoms.end(), o.atoms_.begin(), o.atoms_.end());
  auto terms = terms_;
  terms.insert(terms.end(), o.terms_.begin(), o.terms_.end());
  return RadonMeasure(std::move(atoms), std::move(terms));
}

RadonMeasure RadonMeasure::operator-(const RadonMeasure& o) const { return *this + o.scaled(-1.0); }

RadonMeasure RadonMeasure::scaled(cplx c) const {
  auto atoms = atoms_;
  for (auto& a : atoms) a.second *= c;
  auto terms = terms_;
  for (auto& term : terms)
    for (auto& x : term.coeffs) x *= c;
  return RadonMeasure(std::move(atoms), std::move(terms));
}

HolFunction laplace_transform(const RadonMeasure& mu) { return HolFunction::laplace(mu.atoms(), mu.terms()); }

double hp_norm(const RadonMeasure& mu) {
  double total = 0.0;
  for (const auto& a : mu.atoms()) total += std::abs(a.second);
  if (mu.terms().empty()) return total;

  std::vector<double> breaks{0.0};
  double horizon = 0.0;
  std::size_t max_deg = 0;
  for (const auto& term : mu.terms()) {
    breaks.push_back(term.shift);
    max_deg = std::max(max_deg, term.coeffs.size());
    horizon = std::max(horizon, term.shift + (2.0 * term.coeffs.size() + 50.0) / term.rate.real());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(horizon);

  const int scan = 64 * int(max_deg + 1);
  if (mu.real_valued()) {
    auto g = [&mu](double t) { return mu.density(t).real(); };
    std::vector<double> pts;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      pts.push_back(breaks[i]);
      // Stay strictly inside so a jump at a shift is not mistaken for a root.
      const double lo = breaks[i], hi = breaks[i + 1];
      auto r = sign_changes(g, lo + 1e-14 * std::max(1.0, lo), hi, scan);
      pts.insert(pts.end(), r.begin(), r.end());
    }
    pts.push_back(horizon);
    total += piecewise_abs_integral(g, pts);
  } else {
    auto g = [&mu](double t) { return std::abs(mu.density(t)); };
    const auto cfg = tight_config();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      total += quad::integrate_adaptive<double>(g, breaks[i], breaks[i + 1], cfg).value;
  }
  auto tail = [&mu](double t) { return std::abs(mu.density(t)); };
  total += quad::integrate_dyadic<double>(tail, horizon, quad::Direction::Up, 1e3 * horizon, tight_config()).value;
  return total;
}

RadonMeasure convolve(const RadonMeasure& mu, const RadonMeasure& nu) {
  std::vector<std::pair<double, cplx>> atoms;
  std::vector<ExpPolyTerm> terms;
  for (const auto& [s, c] : mu.atoms())
    for (const auto& [t, d] : nu.atoms()) atoms.emplace_back(s + t, c * d);
  auto atom_times_terms = [&](const RadonMeasure& a, const RadonMeasure& b) {
    for (const auto& [s, c] : a.atoms()) {
      for (ExpPolyTerm term : b.terms()) {
        term.shift += s;
        for (auto& x : term.coeffs) x *= c;
        terms.push_back(std::move(term));
      }
    }
  };
  atom_times_terms(mu, nu);
  atom_times_terms(nu, mu);
  for (const auto& x : mu.terms())
    for (const auto& y : nu.terms()) terms.push_back(convolve_terms(x, y, terms));
  return RadonMeasure(std::move(atoms), std::move(terms));
}

RadonMeasure convolution_power(const RadonMeasure& mu, int n) {
  if (n < 0) throw DomainError("convolution power must be nonnegative");
  RadonMeasure result = RadonMeasure::dirac(0.0);
  RadonMeasure base = mu;
  while (n > 0) {
    if (n & 1) result = convolve(result, base);
    n >>= 1;
    if (n > 0) base = convolve(base, base);
  }
  return result;
}

RadonMeasure cayley_power_measure(int n) {
  if (n < 1) throw DomainError("Cayley power must be at least 1");
  return convolution_power(RadonMeasure::dirac(0.0) - RadonMeasure::exp_decay(1.0, 2.0), n);
}

namespace {

// Density of cayley_power_measure(n): -2 e^{-t} L^{(1)}_{n-1}(2t), by the three-term recurrence
// with the exponential folded into the seeds.
double cayley_density(int n, double t) {
  const double x = 2.0 * t;
  double p0 = std::exp(-t);
  if (n == 1) return -2.0 * p0;
  double p1 = (2.0 - x) * p0;
  for (int k = 1; k + 1 <= n - 1; ++k) {
    const double p2 = ((2.0 * k + 2.0 - x) * p1 - (k + 1.0) * p0) / (k + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return -2.0 * p1;
}

}  // namespace

double hp_power_norm_cayley(int n, int cap) {
  if (n < 1) throw DomainError("Cayley power must be at least 1");
  if (n > cap) throw Overflow("Cayley power beyond the symbolic degree cap");
  auto g = [n](double t) { return cayley_density(n, t); };
  // All n-1 sign changes lie below 2n.
  const double scan_end = 2.0 * n + 2.0;
  std::vector<double> roots;
  for (int pts = 64 * n + 64; pts <= (1 << 24); pts *= 2) {
    roots = sign_changes(g, 0.0, scan_end, pts);
    if (int(roots.size()) >= n - 1) break;
  }
  std::vector<double> pts{0.0};
  pts.insert(pts.end(), roots.begin(), roots.end());
  const double far = 4.0 * n + 60.0;
  pts.push_back(far);
  double total = 1.0 + piecewise_abs_integral(g, pts);
  auto tail = [&g](double t) { return std::abs(g(t)); };
  total += quad::integrate_dyadic<double>(tail, far, quad::Direction::Up, 1e3 * far, tight_config()).value;
  return total;
}

namespace {

// Pieces of z/(z+1) e^{-t/z} = 1 - 1/(z+1) + (e^{-t/z} - 1) - (e^{-t/z} - 1)/(z+1): the density is
// -e^{-s} + k(s) - w(s) with k(s) = -sqrt(t/s) J_1(2 sqrt(ts)) and w = e^{-s} * k.
class PhiDensity {
 public:
  explicit PhiDensity(double t) : t_(t) {}

  double k(double s) const {
    const double x = 2.0 * std::sqrt(t_ * s);
    if (x < 1e-6) return -t_ * (1.0 - x * x / 8.0);
    return -t_ * 2.0 * ::j1(x) / x;
  }

  // Largest step keeping k resolved by an 8-point Gauss rule.
  double step(double s) const { return std::min(2.0, (kPi / 8.0) * (std::sqrt(s / t_) + 1.0 / t_)); }

  // w(b) from w(a).
  double advance(double w, double a, double b) const {
    // History older than 40 units is damped below 1e-17.
    if (b - a > 40.0) {
      w = 0.0;
      a = b - 40.0;
    }
    while (a < b) {
      const double h = std::min(step(a), b - a);
      const double e = a + h;
      double acc = 0.0;
      const auto& g = gl8();
      for (std::size_t i = 0; i < g.x.size(); ++i) {
        // Offset from the step end taken exactly; e - u loses digits when a is large.
        const double u = a + 0.5 * h * (g.x[i] + 1.0);
        acc += g.w[i] * std::exp(-0.5 * h * (1.0 - g.x[i])) * k(u);
      }
      w = std::exp(-h) * w + 0.5 * h * acc;
      a = e;
    }
    return w;
  }

  double density(double s, double w) const { return -std::exp(-s) + k(s) - w; }

 private:
  double t_;
};

}  // namespace

std::vector<double> phi_density(double t, const std::vector<double>& s) {
  if (!(t > 0.0)) throw DomainError("phi density requires t > 0");
  PhiDensity pd(t);
  std::vector<double> out;
  out.reserve(s.size());
  double pos = 0.0, w = 0.0;
  for (double x : s) {
    if (x < pos) throw DomainError("phi density points must be sorted and nonnegative");
    w = pd.advance(w, pos, x);
    pos = x;
    out.push_back(pd.density(x, w));
  }
  return out;
}

double phi_hp_norm(double t) {
  if (!(t > 0.0)) throw DomainError("phi norm requires t > 0");
  PhiDensity pd(t);
  // Oscillation variable X = 2 sqrt(ts); panels cover a quarter period in X.
  const double x_end = std::max(20.0 * t, 2000.0);
  const double du = kPi / (4.0 * std::sqrt(t));
  const int panels = int(std::ceil(x_end / (2.0 * std::sqrt(t)) / du));
  const auto& g = gl16();

  // Signed integral of the density on [a, b] given w(a); returns w(b) through w_end.
  auto piece = [&](double a, double w_a, double b, double& w_end) {
    double pos = a, w = w_a, acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const double s = a + 0.5 * (b - a) * (g.x[i] + 1.0);
      w = pd.advance(w, pos, s);
      pos = s;
      acc += g.w[i] * pd.density(s, w);
    }
    w_end = pd.advance(w, pos, b);
    return 0.5 * (b - a) * acc;
  };

  double total = 1.0;
  double w = 0.0;
  auto process = [&](double a, double b) {
    // Sample the sign on a uniform grid within the panel.
    constexpr int kScan = 16;
    std::vector<double> xs(kScan + 1), ws(kScan + 1), gs(kScan + 1);
    xs[0] = a;
    ws[0] = w;
    gs[0] = pd.density(a, w);
    for (int i = 1; i <= kScan; ++i) {
      xs[i] = a + (b - a) * i / kScan;
      ws[i] = pd.advance(ws[i - 1], xs[i - 1], xs[i]);
      gs[i] = pd.density(xs[i], ws[i]);
    }
    std::vector<double> cuts{a}, cut_w{w};
    for (int i = 0; i < kScan; ++i) {
      if ((gs[i] > 0) != (gs[i + 1] > 0) && gs[i] != 0.0 && gs[i + 1] != 0.0) {
        const double x0 = xs[i], w0 = ws[i];
        auto f = [&](double x) { return pd.density(x, pd.advance(w0, x0, x)); };
        const double r = illinois_root(f, xs[i], gs[i], xs[i + 1], gs[i + 1]);
        cuts.push_back(r);
        cut_w.push_back(pd.advance(w0, x0, r));
      }
    }
    cuts.push_back(b);
    double w_end = ws[kScan];
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      double unused;
      total += std::abs(piece(cuts[j], cut_w[j], cuts[j + 1], unused));
    }
    w = w_end;
  };
  for (int p = 0; p < panels; ++p) {
    const double a = (p * du) * (p * du), b = ((p + 1) * du) * ((p + 1) * du);
    // Keep panels comparable to the unit scale of the e^{-s} factor near the origin.
    for (double lo = a; lo < b;) {
      const double hi = std::min(b, lo + std::max(0.5, 0.5 * lo));
      process(lo, hi);
      lo = hi;
    }
  }
  // Beyond x_end the density behaves like (t/s) J_2(X) with |J_2| averaging (2/pi) sqrt(2/(pi X)).
  total += 2.0 * t * (2.0 / kPi) * std::sqrt(2.0 / kPi) * 2.0 / std::sqrt(x_end);
  return total;
}

}  // namespace opcalc
