#include "opcalc/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "opcalc/measures.hpp"

namespace opcalc {

using quad::Bracket;
using quad::QuadConfig;
using quad::Verdict;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAngleTol = 1e-12;

using CFun = std::function<cplx(cplx)>;
using RFun = std::function<double(double)>;

// Thrown from an integrand to abandon an outer integral once an inner one diverges.
struct InnerDiverged {
  double where;
};

QuadConfig widened(const QuadConfig& cfg) {
  QuadConfig w = cfg;
  w.alpha_min = cfg.alpha_min * std::min(cfg.alpha_min, 1.0);
  w.alpha_max = cfg.alpha_max * std::max(cfg.alpha_max, 1.0);
  w.beta_max = cfg.beta_max * std::max(cfg.beta_max, 1.0);
  return w;
}

QuadConfig inner_config(const QuadConfig& cfg) {
  QuadConfig c = cfg;
  c.rel_tol = 0.1 * cfg.rel_tol;
  c.abs_tol = 0.1 * cfg.abs_tol;
  return c;
}

// Largest value of h over the seeds, refining the `keep` largest discrete local maxima by
// golden-section search on the neighbouring seed interval.
double refined_max(const RFun& h, std::vector<double> seeds, int keep = 16, double* argmax = nullptr) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  const std::size_t n = seeds.size();
  if (n == 0) return 0.0;
  std::vector<double> v(n);
  double best = -kInf, best_x = seeds[0];
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = h(seeds[i]);
    if (std::isnan(v[i])) v[i] = -kInf;
    if (v[i] > best) {
      best = v[i];
      best_x = seeds[i];
    }
  }
  if (best == kInf) {
    if (argmax) *argmax = best_x;
    return best;
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool l = i == 0 || v[i] >= v[i - 1];
    const bool r = i + 1 == n || v[i] >= v[i + 1];
    const bool flat = i > 0 && i + 1 < n && v[i] == v[i - 1] && v[i] == v[i + 1];
    if (l && r && !flat && v[i] > -kInf) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (peaks.size() > std::size_t(keep)) peaks.resize(keep);
  for (std::size_t i : peaks) {
    const double a = i > 0 ? seeds[i - 1] : seeds[i];
    const double b = i + 1 < n ? seeds[i + 1] : seeds[i];
    if (!(b > a)) continue;
    double x;
    const double val = quad::golden_max(h, a, b, &x);
    if (val > best) {
      best = val;
      best_x = x;
    }
  }
  if (argmax) *argmax = best_x;
  return best;
}

// Uniform scan added to line seeds for functions with exponential factors, whose modulus on
// vertical lines is almost periodic.
void add_band_scan(std::vector<double>& seeds, double freq) {
  if (!(freq > 0.0)) return;
  const double h = std::min(0.25, 0.5 / freq);
  for (int k = -2048; k <= 2048; ++k) seeds.push_back(k * h);
}

std::vector<double> line_seeds(double alpha, const HolFunction& f, const QuadConfig& cfg) {
  std::vector<double> s = quad::vertical_line_seeds(alpha, cfg, f.boundary_features());
  add_band_scan(s, f.max_frequency());
  return s;
}

std::vector<double> centers_of(const HolFunction& f) {
  std::vector<double> c = f.boundary_features();
  if (c.empty()) c.push_back(0.0);
  return c;
}

Bracket<double> diverged_bracket() {
  Bracket<double> b;
  b.value = kInf;
  b.error_est = kInf;
  b.verdict = Verdict::Diverged;
  return b;
}

// Improper integral over (0, inf); a Diverged verdict stands only if it recurs on the
// widened range.
Bracket<double> improper_checked(const RFun& f, const QuadConfig& cfg) {
  Bracket<double> b = quad::improper_integrate<double>(f, cfg, 1.0);
  if (b.verdict == Verdict::Diverged) {
    const Bracket<double> again = quad::improper_integrate<double>(f, widened(cfg), 1.0);
    if (again.verdict != Verdict::Diverged) b.verdict = Verdict::Inconclusive;
  }
  return b;
}

NormReport report(Space sp, Bracket<double> b) {
  NormReport r;
  r.space = sp;
  r.value = b;
  r.membership = membership_of(b.verdict);
  return r;
}

// int_0^inf sup_beta |g(alpha + i beta)| d alpha.
Bracket<double> line_sup_integral(const CFun& g, const HolFunction& shape, const QuadConfig& cfg) {
  auto integrand = [&](double a) {
    const std::vector<double> seeds = line_seeds(a, shape, cfg);
    return refined_max([&](double b) { return std::abs(g(cplx(a, b))); }, seeds);
  };
  return improper_checked(integrand, cfg);
}

// int_0^inf alpha^s int_R |g(alpha + i beta)| / |alpha + i beta|^{s+1} d beta d alpha.
Bracket<double> vs_integral(const CFun& g, const HolFunction& shape, double s, const QuadConfig& cfg) {
  if (!(s > -1.0)) throw DomainError("Vs norm requires s > -1");
  const std::vector<double> centers = centers_of(shape);
  const QuadConfig icfg = inner_config(cfg);
  quad::InnerTracker tracker;
  auto inner_at = [&](double a, const QuadConfig& c) {
    auto h = [&](double b) {
      const cplx z(a, b);
      const double r = std::abs(z);
      return std::pow(a / r, s) * std::abs(g(z)) / r;
    };
    return quad::integrate_real_line<double>(h, centers, a, c);
  };
  auto outer = [&](double a) {
    const Bracket<double> in = inner_at(a, icfg);
    if (in.verdict == Verdict::Diverged) throw InnerDiverged{a};
    tracker.note(a, 1.0, in);
    return in.value;
  };
  try {
    Bracket<double> b = improper_checked(outer, cfg);
    b.verdict = quad::combine(b.verdict, tracker.verdict(cfg));
    return b;
  } catch (const InnerDiverged& d) {
    if (inner_at(d.where, widened(icfg)).verdict == Verdict::Diverged) return diverged_bracket();
    Bracket<double> b;
    b.value = kInf;
    b.error_est = kInf;
    b.verdict = Verdict::Inconclusive;
    return b;
  }
}

// sup_{0 <= phi <= psi} int_0^inf (|g(t e^{i phi})| + |g(t e^{-i phi})|) dt; the endpoint uses
// the boundary values.
Bracket<double> h1_integral(const CFun& g, double psi, const QuadConfig& cfg) {
  Verdict verdict = Verdict::Converged;
  double err = 0.0;
  long evals = 0;
  bool diverged = false;
  auto ray = [&](double phi) {
    if (diverged) return kInf;
    auto h = [&](double t) {
      const cplx e = std::polar(t, phi);
      return std::abs(g(e)) + std::abs(g(std::conj(e)));
    };
    const Bracket<double> r = improper_checked(h, cfg);
    evals += r.evaluations;
    if (r.verdict == Verdict::Diverged) {
      diverged = true;
      return kInf;
    }
    verdict = quad::combine(verdict, r.verdict);
    err = std::max(err, r.error_est);
    return r.value;
  };
  std::vector<double> seeds;
  const int m = 16;
  for (int k = 0; k <= m; ++k) seeds.push_back(psi * k / m);
  const double v = refined_max(ray, seeds, 4);
  if (diverged) return diverged_bracket();
  Bracket<double> b;
  b.value = v;
  b.error_est = err;
  b.verdict = verdict;
  b.evaluations = evals;
  return b;
}

cplx value_at(const HolFunction& f, cplx z) {
  if (z == 0.0) {
    if (auto l = f.limit_at_zero()) return *l;
  }
  return f.jet(z).v;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> out;
  const int n = std::max(2, int(std::ceil(std::log10(hi / lo) * per_decade)));
  for (int k = 0; k <= n; ++k) out.push_back(std::log(lo) + (std::log(hi) - std::log(lo)) * k / n);
  return out;
}

double ray_sup(const HolFunction& f, double phi) {
  auto h = [&](double x) {
    const cplx z = std::polar(std::exp(x), phi);
    return std::max(std::abs(value_at(f, z)), std::abs(value_at(f, std::conj(z))));
  };
  return refined_max(h, log_grid(1e-8, 1e8, 8), 8);
}

bool all_derivatives_known(const HolFunction& f) {
  return f.kind() != FnKind::Derivative || f.has_second_derivative();
}

CFun derivative_fn(const HolFunction& f) {
  return [f](cplx z) { return f.jet(z).d1; };
}

CFun value_fn(const HolFunction& f) {
  return [f](cplx z) { return f.jet(z).v; };
}

void require_half_plane(const HolFunction& f, const char* what) {
  if (!f.domain().contains_half_plane()) {
    throw PreconditionFailed(std::string(what) + " needs a function on the right half-plane, got " +
                             f.describe());
  }
}

std::optional<RadonMeasure> measure_of(const HolFunction& f) {
  const auto& p = f.params();
  switch (f.kind()) {
    case FnKind::Constant:
      return RadonMeasure::dirac(0.0, p[0]);
    case FnKind::Exp:
      return RadonMeasure::dirac(p[0].real());
    case FnKind::Resolvent:
      if (p[0].real() > 0.0) return RadonMeasure::exp_decay(p[0]);
      return std::nullopt;
    case FnKind::CayleyPower:
      return cayley_power_measure(f.order());
    case FnKind::BandLimited:
      return RadonMeasure(f.atoms(), {});
    case FnKind::LaplaceMeasure:
      return RadonMeasure(f.atoms(), f.exp_poly_terms());
    case FnKind::Sum: {
      auto a = measure_of(f.children()[0]);
      auto b = measure_of(f.children()[1]);
      if (a && b) return *a + *b;
      return std::nullopt;
    }
    case FnKind::Product: {
      auto a = measure_of(f.children()[0]);
      auto b = measure_of(f.children()[1]);
      if (a && b) return convolve(*a, *b);
      return std::nullopt;
    }
    case FnKind::ArgScale: {
      auto a = measure_of(f.children()[0]);
      if (!a) return std::nullopt;
      const double t = p[0].real();
      std::vector<std::pair<double, cplx>> atoms;
      for (const auto& [s, c] : a->atoms()) atoms.push_back({t * s, c});
      std::vector<ExpPolyTerm> terms;
      for (ExpPolyTerm term : a->terms()) {
        double scale = 1.0 / t;
        for (auto& c : term.coeffs) {
          c *= scale;
          scale /= t;
        }
        term.rate /= t;
        term.shift *= t;
        terms.push_back(term);
      }
      return RadonMeasure(atoms, terms);
    }
    case FnKind::ArgShift: {
      auto a = measure_of(f.children()[0]);
      if (!a) return std::nullopt;
      const cplx tau = p[0];
      std::vector<std::pair<double, cplx>> atoms;
      for (const auto& [s, c] : a->atoms()) atoms.push_back({s, c * std::exp(-tau * s)});
      std::vector<ExpPolyTerm> terms;
      for (ExpPolyTerm term : a->terms()) {
        const cplx w = std::exp(-tau * term.shift);
        for (auto& c : term.coeffs) c *= w;
        term.rate += tau;
        terms.push_back(term);
      }
      return RadonMeasure(atoms, terms);
    }
    default:
      return std::nullopt;
  }
}

using ExpSum = std::vector<std::pair<double, cplx>>;

// f = sum_k c_k e^{-t_k z} when f is built from exponentials and constants only.
std::optional<ExpSum> exp_sum_terms(const HolFunction& f) {
  const auto& p = f.params();
  switch (f.kind()) {
    case FnKind::Constant:
      return ExpSum{{0.0, p[0]}};
    case FnKind::Exp:
      return ExpSum{{p[0].real(), 1.0}};
    case FnKind::BandLimited:
      return f.atoms();
    case FnKind::Sum: {
      auto a = exp_sum_terms(f.children()[0]);
      auto b = exp_sum_terms(f.children()[1]);
      if (!a || !b) return std::nullopt;
      a->insert(a->end(), b->begin(), b->end());
      return a;
    }
    case FnKind::Product: {
      auto a = exp_sum_terms(f.children()[0]);
      auto b = exp_sum_terms(f.children()[1]);
      if (!a || !b) return std::nullopt;
      ExpSum out;
      for (const auto& [s, c] : *a) {
        for (const auto& [t, d] : *b) out.push_back({s + t, c * d});
      }
      return out;
    }
    case FnKind::ArgScale: {
      auto a = exp_sum_terms(f.children()[0]);
      if (!a) return std::nullopt;
      for (auto& [t, c] : *a) t *= p[0].real();
      return a;
    }
    case FnKind::ArgShift: {
      auto a = exp_sum_terms(f.children()[0]);
      if (!a) return std::nullopt;
      for (auto& [t, c] : *a) c *= std::exp(-p[0] * t);
      return a;
    }
    default:
      return std::nullopt;
  }
}

// Exponential rates appearing in f, with 0 standing for every non-oscillating factor.
std::vector<double> rates_of(const HolFunction& f) {
  constexpr std::size_t cap = 64;
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    if (v.size() > cap) v.resize(cap);
    return v;
  };
  switch (f.kind()) {
    case FnKind::Exp:
      return {f.params()[0].real()};
    case FnKind::BandLimited: {
      std::vector<double> v;
      for (const auto& a : f.atoms()) v.push_back(a.first);
      return uniq(v);
    }
    case FnKind::EDelta:
      return {0.0, f.params()[0].real()};
    case FnKind::Sum: {
      std::vector<double> v = rates_of(f.children()[0]);
      for (double t : rates_of(f.children()[1])) v.push_back(t);
      return uniq(v);
    }
    case FnKind::Product: {
      std::vector<double> v;
      for (double s : rates_of(f.children()[0])) {
        for (double t : rates_of(f.children()[1])) v.push_back(s + t);
      }
      return uniq(v);
    }
    case FnKind::ArgScale: {
      std::vector<double> v = rates_of(f.children()[0]);
      for (double& t : v) t *= f.params()[0].real();
      return v;
    }
    case FnKind::ArgShift:
    case FnKind::Derivative:
      return rates_of(f.children()[0]);
    default:
      return {0.0};
  }
}

// Smallest q <= max_q with |x - p/q| <= tol |x|; 0 if none.
long rational_denominator(double x, long max_q, double tol) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long p2 = long(a) * p1 + p0, q2 = long(a) * q1 + q0;
    if (q2 > max_q) return 0;
    if (std::abs(x - double(p2) / double(q2)) <= tol * std::abs(x)) return q2;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-300) return 0;
    r = 1.0 / frac;
  }
  return 0;
}

// sup over real beta of |sum_k b_k e^{-t_k (alpha + i beta)}|. Rates with rational ratios form
// groups G_g(theta) = sum a_k e^{-i n_k theta}; distinct groups have independent phases on the
// line, so the supremum is max_phi sum_g max_theta Re(e^{-i phi} G_g(theta)).
double exp_sum_line_sup(const ExpSum& terms, double alpha) {
  constexpr long max_q = 64;
  constexpr long max_n = 4096;
  constexpr double ratio_tol = 1e-12;
  std::vector<std::pair<double, cplx>> a;
  cplx constant = 0.0;
  for (const auto& [t, b] : terms) {
    const cplx v = b * std::exp(-t * alpha);
    if (v == 0.0) continue;
    if (t == 0.0) {
      constant += v;
      continue;
    }
    auto it = std::find_if(a.begin(), a.end(), [&](const auto& x) { return x.first == t; });
    if (it == a.end()) {
      a.push_back({t, v});
    } else {
      it->second += v;
    }
  }
  if (a.empty()) return std::abs(constant);

  struct Group {
    std::vector<std::pair<long, cplx>> terms;
  };
  std::vector<Group> groups;
  std::vector<bool> used(a.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> members{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (!used[j] && rational_denominator(a[j].first / a[i].first, max_q, ratio_tol) > 0) {
        members.push_back(j);
        used[j] = true;
      }
    }
    long l = 1;
    for (std::size_t m : members) l = std::lcm(l, rational_denominator(a[m].first / a[i].first, max_q, ratio_tol));
    const double omega = a[i].first / double(l);
    Group g;
    bool ok = true;
    for (std::size_t m : members) {
      const long n = std::lround(a[m].first / omega);
      if (n > max_n) ok = false;
      g.terms.push_back({n, a[m].second});
    }
    if (ok) {
      groups.push_back(std::move(g));
    } else {
      for (std::size_t m : members) groups.push_back(Group{{{1, a[m].second}}});
    }
  }
  const bool independent = std::all_of(groups.begin(), groups.end(), [](const Group& g) { return g.terms.size() == 1; });
  if (independent) {
    double total = std::abs(constant);
    for (const Group& g : groups) total += std::abs(g.terms[0].second);
    return total;
  }
  groups.front().terms.push_back({0, constant});

  auto eval = [](const Group& g, double theta) {
    cplx s = 0.0;
    for (const auto& [n, c] : g.terms) s += c * std::exp(cplx(0.0, -double(n) * theta));
    return s;
  };
  auto theta_seeds = [](const Group& g) {
    long top = 1;
    for (const auto& t : g.terms) top = std::max(top, t.first);
    const long m = std::max<long>(64, 16 * top);
    std::vector<double> s;
    for (long k = -1; k <= m + 1; ++k) s.push_back(2.0 * kPi * double(k) / double(m));
    return s;
  };
  if (groups.size() == 1) {
    const Group& g = groups.front();
    return refined_max([&](double th) { return std::abs(eval(g, th)); }, theta_seeds(g), 8);
  }
  std::vector<std::vector<double>> seeds;
  for (const Group& g : groups) seeds.push_back(theta_seeds(g));
  auto support = [&](double phi) {
    const cplx u = std::exp(cplx(0.0, -phi));
    double total = 0.0;
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const Group& g = groups[k];
      if (g.terms.size() == 1 && g.terms[0].first != 0) {
        total += std::abs(g.terms[0].second);
        continue;
      }
      total += refined_max([&](double th) { return (u * eval(g, th)).real(); }, seeds[k], 4);
    }
    return total;
  };
  std::vector<double> phis;
  for (int k = -1; k <= 129; ++k) phis.push_back(2.0 * kPi * k / 128.0);
  return refined_max(support, phis, 8);
}

// Vs integrals of functions mixing several exponential rates have almost periodic moduli on
// vertical lines, whose tails the real-line integrator cannot resolve.
void require_steady_modulus(const HolFunction& f, bool derivative) {
  std::vector<double> r = rates_of(f);
  if (derivative && exp_sum_terms(f)) r.erase(std::remove(r.begin(), r.end(), 0.0), r.end());
  if (r.size() > 1) {
    throw Unsupported("Vs norm of " + f.describe() + ": modulus oscillates along vertical lines");
  }
}

}  // namespace

std::optional<RadonMeasure> representing_measure(const HolFunction& f) { return measure_of(f); }

// ---------------------------------------------------------------- spaces

std::string Space::describe() const {
  std::ostringstream os;
  switch (kind) {
    case SpaceKind::B0:
      return "B0";
    case SpaceKind::B:
      return "B";
    case SpaceKind::W:
      return "W";
    case SpaceKind::E0:
      return "E0";
    case SpaceKind::E:
      return "E";
    case SpaceKind::HP:
      return "HP";
    case SpaceKind::Ds:
      os << "Ds(" << param << ")";
      break;
    case SpaceKind::DsInf:
      os << "DsInf(" << param << ")";
      break;
    case SpaceKind::H1Sector:
      os << "H1Sector(" << param << ")";
      break;
    case SpaceKind::HPsi:
      os << "HPsi(" << param << ")";
      break;
  }
  return os.str();
}

Space Space::parse(const std::string& text) {
  const auto open = text.find('(');
  const std::string head = text.substr(0, open);
  double param = 0.0;
  if (open != std::string::npos) {
    const auto close = text.find(')', open);
    if (close == std::string::npos || close + 1 != text.size()) throw ParseError("bad space: " + text);
    std::string arg = text.substr(open + 1, close - open - 1);
    double scale = 1.0;
    const auto pi_pos = arg.find("pi");
    if (pi_pos != std::string::npos) {
      std::string num = arg.substr(0, pi_pos);
      std::string den = arg.substr(pi_pos + 2);
      scale = kPi;
      if (!num.empty()) {
        if (num.back() == '*') num.pop_back();
        scale *= std::stod(num);
      }
      if (!den.empty()) {
        if (den.front() != '/') throw ParseError("bad angle: " + arg);
        scale /= std::stod(den.substr(1));
      }
      param = scale;
    } else {
      try {
        std::size_t used = 0;
        param = std::stod(arg, &used);
        if (used != arg.size()) throw ParseError("bad parameter: " + arg);
      } catch (const std::logic_error&) {
        throw ParseError("bad parameter: " + arg);
      }
    }
  }
  const bool has_param = open != std::string::npos;
  auto plain = [&](SpaceKind k) {
    if (has_param) throw ParseError("space " + head + " takes no parameter");
    return Space{k, 0.0};
  };
  auto with = [&](SpaceKind k) {
    if (!has_param) throw ParseError("space " + head + " needs a parameter");
    return Space{k, param};
  };
  if (head == "B0") return plain(SpaceKind::B0);
  if (head == "B") return plain(SpaceKind::B);
  if (head == "W") return plain(SpaceKind::W);
  if (head == "E0") return plain(SpaceKind::E0);
  if (head == "E") return plain(SpaceKind::E);
  if (head == "HP") return plain(SpaceKind::HP);
  if (head == "Ds" || head == "D") return with(SpaceKind::Ds);
  if (head == "DsInf") return with(SpaceKind::DsInf);
  if (head == "H1Sector" || head == "H1") return with(SpaceKind::H1Sector);
  if (head == "HPsi" || head == "H") return with(SpaceKind::HPsi);
  throw ParseError("unknown space: " + text);
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::In:
      return "In";
    case Membership::NotIn:
      return "NotIn";
    case Membership::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

Membership membership_of(Verdict v) {
  switch (v) {
    case Verdict::Converged:
      return Membership::In;
    case Verdict::Diverged:
      return Membership::NotIn;
    case Verdict::Inconclusive:
      return Membership::Inconclusive;
  }
  return Membership::Inconclusive;
}

// ---------------------------------------------------------------- sup norm

SupReport sup_norm(const HolFunction& f, const Domain& region, const QuadConfig& cfg) {
  if (region.half_angle > f.domain().half_angle + kAngleTol) {
    throw PreconditionFailed("region " + region.describe() + " exceeds the domain of " + f.describe());
  }
  SupReport out;
  if (!f.bounded() && region.half_angle >= f.domain().half_angle - kAngleTol) {
    out.value = kInf;
    out.bounded = false;
    return out;
  }
  double best = 0.0;
  cplx where = 0.0;
  auto consider = [&](double v, cplx z) {
    if (v > best || std::isinf(v)) {
      best = v;
      where = z;
    }
  };
  if (auto l = f.limit_at_zero()) consider(std::abs(*l), 0.0);
  if (auto l = f.limit_at_infinity()) consider(std::abs(*l), cplx(kInf, 0.0));

  const std::optional<ExpSum> terms = exp_sum_terms(f);
  if (region.is_half_plane() && terms) {
    // Bounded exponential sums take their supremum on the imaginary axis.
    consider(exp_sum_line_sup(*terms, 0.0), 0.0);
  } else if (region.is_half_plane()) {
    std::vector<double> seeds{0.0};
    for (double x : log_grid(1e-8, std::max(1e8, cfg.beta_max), 16)) {
      seeds.push_back(std::exp(x));
      seeds.push_back(-std::exp(x));
    }
    for (double c : f.boundary_features()) {
      seeds.push_back(c);
      for (int j = -24; j <= 4; ++j) {
        const double d = std::pow(10.0, j / 4.0);
        seeds.push_back(c - d);
        seeds.push_back(c + d);
      }
    }
    add_band_scan(seeds, f.max_frequency());
    double arg = 0.0;
    const double v = refined_max([&](double b) { return std::abs(value_at(f, cplx(0.0, b))); }, seeds, 16, &arg);
    consider(v, cplx(0.0, arg));
    for (double phi : {0.0, kPi / 4}) consider(ray_sup(f, phi), std::polar(1.0, phi));
  } else {
    const double psi = region.half_angle;
    for (double phi : {psi, 0.5 * psi, 0.0}) consider(ray_sup(f, phi), std::polar(1.0, phi));
  }
  out.value = best;
  out.bounded = std::isfinite(best);
  out.argmax_re = where.real();
  out.argmax_im = where.imag();
  return out;
}

// ---------------------------------------------------------------- B, W

NormReport b0_norm(const HolFunction& f, const QuadConfig& cfg) {
  require_half_plane(f, "b0_norm");
  if (!all_derivatives_known(f)) throw Unsupported("b0_norm needs f'");
  if (auto terms = exp_sum_terms(f)) {
    for (auto& [t, c] : *terms) c *= -t;
    return report({SpaceKind::B0}, improper_checked([&](double a) { return exp_sum_line_sup(*terms, a); }, cfg));
  }
  return report({SpaceKind::B0}, line_sup_integral(derivative_fn(f), f, cfg));
}

NormReport w_norm(const HolFunction& g, const QuadConfig& cfg) {
  require_half_plane(g, "w_norm");
  if (auto terms = exp_sum_terms(g)) {
    return report({SpaceKind::W}, improper_checked([&](double a) { return exp_sum_line_sup(*terms, a); }, cfg));
  }
  return report({SpaceKind::W}, line_sup_integral(value_fn(g), g, cfg));
}

NormReport b_norm(const HolFunction& f, const QuadConfig& cfg) {
  require_half_plane(f, "b_norm");
  const SupReport s = sup_norm(f, Domain::half_plane(), cfg);
  if (!s.bounded) return report({SpaceKind::B}, diverged_bracket());
  NormReport r = b0_norm(f, cfg);
  r.space = {SpaceKind::B};
  r.value.value += s.value;
  return r;
}

// ---------------------------------------------------------------- Vs, Ds

NormReport vs_norm(const HolFunction& g, double s, const QuadConfig& cfg) {
  require_half_plane(g, "vs_norm");
  require_steady_modulus(g, false);
  return report({SpaceKind::Ds, s}, vs_integral(value_fn(g), g, s, cfg));
}

NormReport ds0_norm(const HolFunction& f, double s, const QuadConfig& cfg) {
  require_half_plane(f, "ds_norm");
  require_steady_modulus(f, true);
  return report({SpaceKind::Ds, s}, vs_integral(derivative_fn(f), f, s, cfg));
}

NormReport ds_norm(const HolFunction& f, double s, const QuadConfig& cfg) {
  NormReport r = ds0_norm(f, s, cfg);
  if (r.value.verdict == Verdict::Diverged) return r;
  std::optional<cplx> inf = f.limit_at_infinity();
  if (!inf) {
    try {
      inf = sectorial_limits(f).at_infinity;
    } catch (const NoLimit&) {
      r.value.verdict = quad::combine(r.value.verdict, Verdict::Inconclusive);
      r.membership = membership_of(r.value.verdict);
      return r;
    }
  }
  r.value.value += std::abs(*inf);
  return r;
}

NormReport ds_inf_norm(const HolFunction& f, double s, const QuadConfig& cfg) {
  require_half_plane(f, "ds_inf_norm");
  const SupReport sup = sup_norm(f, Domain::half_plane(), cfg);
  if (!sup.bounded) return report({SpaceKind::DsInf, s}, diverged_bracket());
  NormReport r = ds0_norm(f, s, cfg);
  r.space = {SpaceKind::DsInf, s};
  r.value.value += sup.value;
  return r;
}

// ---------------------------------------------------------------- H1, Hpsi

NormReport h1_sector_norm(const HolFunction& g, double psi, const QuadConfig& cfg) {
  if (!(psi > 0.0 && psi < kPi)) throw DomainError("sector angle must lie in (0, pi)");
  if (psi > g.domain().half_angle + kAngleTol) {
    throw PreconditionFailed("sector exceeds the domain of " + g.describe());
  }
  return report({SpaceKind::H1Sector, psi}, h1_integral(value_fn(g), psi, cfg));
}

NormReport hpsi_norm(const HolFunction& f, double psi, const QuadConfig& cfg) {
  if (!(psi > 0.0 && psi < kPi)) throw DomainError("sector angle must lie in (0, pi)");
  if (psi > f.domain().half_angle + kAngleTol) {
    throw PreconditionFailed("sector exceeds the domain of " + f.describe());
  }
  const Space sp{SpaceKind::HPsi, psi};
  Bracket<double> h1 = h1_integral(derivative_fn(f), psi, cfg);
  if (h1.verdict == Verdict::Diverged) return report(sp, h1);
  const SupReport sup = sup_norm(f, Domain{psi}, cfg);
  if (!sup.bounded) return report(sp, diverged_bracket());
  h1.value += sup.value;
  return report(sp, h1);
}

// ---------------------------------------------------------------- E

namespace {

NormReport e0_impl(const HolFunction& g, const QuadConfig& cfg, int per_decade) {
  require_half_plane(g, "e0_norm");
  const std::vector<double> centers = centers_of(g);
  const QuadConfig icfg = inner_config(cfg);
  Verdict verdict = Verdict::Converged;
  double err = 0.0;
  long evals = 0;
  auto h = [&](double la) {
    const double a = std::exp(la);
    auto in = [&](double b) { return std::abs(g.jet(cplx(a, b)).d1); };
    const Bracket<double> r = quad::integrate_real_line<double>(in, centers, a, icfg);
    evals += r.evaluations;
    if (r.verdict == Verdict::Diverged) throw InnerDiverged{a};
    verdict = quad::combine(verdict, r.verdict);
    err = std::max(err, a * r.error_est);
    return a * r.value;
  };
  Bracket<double> b;
  try {
    const std::vector<double> grid = log_grid(cfg.alpha_min, cfg.alpha_max, per_decade);
    b.value = refined_max(h, grid, 8);
    const double lo = std::log(cfg.alpha_min), hi = std::log(cfg.alpha_max), dec = std::log(10.0);
    const double g_hi = h(hi), g_hi1 = h(hi - dec), g_lo = h(lo), g_lo1 = h(lo + dec);
    const double grow = cfg.divergence_growth_factor;
    if ((g_hi1 > 0.0 && g_hi >= grow * g_hi1) || (g_lo1 > 0.0 && g_lo >= grow * g_lo1)) {
      b.verdict = Verdict::Diverged;
    } else {
      b.verdict = verdict;
    }
    b.error_est = err;
    b.evaluations = evals;
  } catch (const InnerDiverged&) {
    b = diverged_bracket();
  }
  if (!std::isfinite(b.value)) b.verdict = Verdict::Diverged;
  return report({SpaceKind::E0}, b);
}

}  // namespace

NormReport e0_norm(const HolFunction& g, const QuadConfig& cfg, int points_per_decade) {
  return e0_impl(g, cfg, points_per_decade);
}

NormReport e_norm(const HolFunction& g, const QuadConfig& cfg) {
  NormReport r = e0_norm(g, cfg);
  r.space = {SpaceKind::E};
  if (r.value.verdict == Verdict::Diverged) return r;
  if (auto inf = g.limit_at_infinity()) {
    r.value.value += std::abs(*inf);
  } else {
    r.value.verdict = quad::combine(r.value.verdict, Verdict::Inconclusive);
    r.membership = membership_of(r.value.verdict);
  }
  return r;
}

// ---------------------------------------------------------------- HP

NormReport hp_norm_of(const HolFunction& f) {
  Bracket<double> b;
  if (f.kind() == FnKind::PhiT) {
    b.value = phi_hp_norm(f.params()[0].real());
  } else if (f.kind() == FnKind::CayleyPower) {
    b.value = hp_power_norm_cayley(f.order());
  } else {
    auto mu = measure_of(f);
    if (!mu) throw PreconditionFailed("no representing measure is known for " + f.describe());
    b.value = hp_norm(*mu);
  }
  b.error_est = 1e-9 * b.value;
  return report({SpaceKind::HP}, b);
}

NormReport compute_norm(const Space& space, const HolFunction& f, const QuadConfig& cfg) {
  switch (space.kind) {
    case SpaceKind::B0:
      return b0_norm(f, cfg);
    case SpaceKind::B:
      return b_norm(f, cfg);
    case SpaceKind::W:
      return w_norm(f, cfg);
    case SpaceKind::E0:
      return e0_norm(f, cfg);
    case SpaceKind::E:
      return e_norm(f, cfg);
    case SpaceKind::Ds:
      return ds_norm(f, space.param, cfg);
    case SpaceKind::DsInf:
      return ds_inf_norm(f, space.param, cfg);
    case SpaceKind::H1Sector:
      return h1_sector_norm(f, space.param, cfg);
    case SpaceKind::HPsi:
      return hpsi_norm(f, space.param, cfg);
    case SpaceKind::HP:
      return hp_norm_of(f);
  }
  throw Unsupported("unknown space");
}

// ---------------------------------------------------------------- pairings

Bracket<cplx> duality_pairing(const HolFunction& g, const HolFunction& f, const QuadConfig& cfg) {
  require_half_plane(g, "duality_pairing");
  require_half_plane(f, "duality_pairing");
  if (e0_norm(g, cfg).value.verdict != Verdict::Converged) {
    throw PreconditionFailed("e0_norm of " + g.describe() + " did not converge");
  }
  if (b0_norm(f, cfg).value.verdict != Verdict::Converged) {
    throw PreconditionFailed("b0_norm of " + f.describe() + " did not converge");
  }
  std::vector<double> centers = f.boundary_features();
  for (double c : g.boundary_features()) centers.push_back(-c);
  if (centers.empty()) centers.push_back(0.0);
  const QuadConfig icfg = inner_config(cfg);
  const double omega = g.max_frequency() + f.max_frequency();
  quad::InnerTracker tracker;
  auto outer = [&](double a) {
    auto h = [&](double b) { return g.jet(cplx(a, -b)).d1 * f.jet(cplx(a, b)).d1; };
    const Bracket<cplx> r = quad::integrate_real_line_oscillatory<cplx>(h, centers, a, omega, icfg);
    tracker.note(a, a, r);
    return a * r.value;
  };
  Bracket<cplx> b = quad::improper_integrate<cplx>(outer, cfg, 1.0);
  b.verdict = quad::combine(b.verdict, tracker.verdict(cfg));
  return b;
}

Bracket<cplx> boundary_pairing(const HolFunction& g, const HolFunction& f, const QuadConfig& cfg) {
  if (!g.good_for_green() || !f.good_for_green()) {
    throw PreconditionFailed("boundary pairing needs rational functions without poles in the closed half-plane");
  }
  const cplx g_inf = g.limit_at_infinity().value_or(0.0);
  const cplx f_inf = f.limit_at_infinity().value_or(0.0);
  std::vector<double> centers = f.boundary_features();
  for (double c : g.boundary_features()) centers.push_back(-c);
  if (centers.empty()) centers.push_back(0.0);
  auto h = [&](double b) {
    return 0.25 * (value_at(g, cplx(0.0, -b)) - g_inf) * (value_at(f, cplx(0.0, b)) - f_inf);
  };
  return quad::integrate_real_line<cplx>(h, centers, 1.0, cfg);
}

Bracket<cplx> apply_Q_s(const HolFunction& g, double s, cplx z, const QuadConfig& cfg) {
  if (!(z.real() >= 0.0)) throw DomainError("apply_Q_s needs Re z >= 0");
  if (vs_norm(g, s, cfg).value.verdict != Verdict::Converged) {
    throw PreconditionFailed("g is not in Vs for s = " + std::to_string(s));
  }
  std::vector<double> centers = centers_of(g);
  centers.push_back(z.imag());
  const QuadConfig icfg = inner_config(cfg);
  quad::InnerTracker tracker;
  auto outer = [&](double a) {
    auto h = [&](double b) {
      const cplx w(a + z.real(), z.imag() - b);
      return g.jet(cplx(a, b)).v * std::pow(a / w, s) / w;
    };
    const Bracket<cplx> r = quad::integrate_real_line_oscillatory<cplx>(h, centers, a, g.max_frequency(), icfg);
    tracker.note(a, 1.0, r);
    return r.value;
  };
  Bracket<cplx> b = quad::improper_integrate<cplx>(outer, cfg, 1.0);
  b.verdict = quad::combine(b.verdict, tracker.verdict(cfg));
  const double c = -std::pow(2.0, s) / kPi;
  b.value *= c;
  b.error_est *= std::abs(c);
  return b;
}

GestCheck gest_bound_check(const std::vector<std::pair<double, cplx>>& terms, double eps, double sigma,
                           const QuadConfig& cfg) {
  if (!(eps > 0.0 && eps <= sigma)) throw DomainError("need 0 < eps <= sigma");
  for (const auto& [t, c] : terms) {
    if (t < eps || t > sigma) throw DomainError("exponent outside [eps, sigma]");
  }
  GestCheck out;
  const double factor = 1.0 + 4.0 * std::log(1.0 + sigma / eps);
  bool zero = true;
  for (const auto& tc : terms) zero = zero && tc.second == 0.0;
  if (zero) {
    out.holds = true;
    return out;
  }
  const HolFunction f = HolFunction::band_limited(terms);
  const SupReport sup = sup_norm(f, Domain::half_plane(), cfg);
  const NormReport b0 = b0_norm(f, cfg);
  out.sup = sup.value;
  out.b_norm = sup.value + b0.value.value;
  out.bound = sup.value * factor;
  out.verdict = b0.value.verdict;
  out.holds = out.verdict == Verdict::Converged && out.b_norm <= out.bound;
  return out;
}

}  // namespace opcalc
