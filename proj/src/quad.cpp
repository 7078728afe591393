#include "opcalc/quad.hpp"

#include <stdexcept>

namespace opcalc::quad {

void QuadConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(alpha_min > 0.0) || !(alpha_min < alpha_max)) throw std::invalid_argument("need 0 < alpha_min < alpha_max");
  if (!(beta_max > 0.0)) throw std::invalid_argument("beta_max must be positive");
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (sup_seeds < 4) throw std::invalid_argument("sup_seeds must be >= 4");
  if (!(divergence_growth_factor > 1.0)) throw std::invalid_argument("divergence_growth_factor must exceed 1");
}

double QuadConfig::divergence_ratio() const {
  return std::pow(divergence_growth_factor, -std::log10(2.0));
}

void to_json(nlohmann::json& j, const QuadConfig& c) {
  j = nlohmann::json{{"rel_tol", c.rel_tol},
                     {"abs_tol", c.abs_tol},
                     {"max_depth", c.max_depth},
                     {"alpha_min", c.alpha_min},
                     {"alpha_max", c.alpha_max},
                     {"beta_max", c.beta_max},
                     {"sup_seeds", c.sup_seeds},
                     {"divergence_growth_factor", c.divergence_growth_factor}};
}

void from_json(const nlohmann::json& j, QuadConfig& c) {
  QuadConfig d;
  c.rel_tol = j.value("rel_tol", d.rel_tol);
  c.abs_tol = j.value("abs_tol", d.abs_tol);
  c.max_depth = j.value("max_depth", d.max_depth);
  c.alpha_min = j.value("alpha_min", d.alpha_min);
  c.alpha_max = j.value("alpha_max", d.alpha_max);
  c.beta_max = j.value("beta_max", d.beta_max);
  c.sup_seeds = j.value("sup_seeds", d.sup_seeds);
  c.divergence_growth_factor = j.value("divergence_growth_factor", d.divergence_growth_factor);
  c.validate();
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Converged:
      return "Converged";
    case Verdict::Diverged:
      return "Diverged";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Diverged || b == Verdict::Diverged) return Verdict::Diverged;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Converged;
}

double golden_max(const std::function<double(double)>& h, double a, double b, double* argmax) {
  constexpr double kInvPhi = 0.6180339887498949;
  double best_x = a, best = h(a);
  const double hb = h(b);
  if (hb > best) {
    best = hb;
    best_x = b;
  }
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = h(x1), f2 = h(x2);
  const double scale = std::max(std::abs(a), std::abs(b));
  for (int it = 0; it < 200; ++it) {
    if (std::abs(b - a) <= 1e-12 * scale + 1e-300) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = h(x2);
    }
    if (f1 > best) {
      best = f1;
      best_x = x1;
    }
    if (f2 > best) {
      best = f2;
      best_x = x2;
    }
  }
  if (argmax) *argmax = best_x;
  return best;
}

double multistart_max(const std::function<double(double)>& h, std::vector<double> seeds, double* argmax) {
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  const std::size_t n = seeds.size();
  if (n == 0) return 0.0;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = h(seeds[i]);
    if (std::isnan(vals[i])) vals[i] = -std::numeric_limits<double>::infinity();
  }
  double best = vals[0], best_x = seeds[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (vals[i] > best) {
      best = vals[i];
      best_x = seeds[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
    const bool right_ok = i + 1 == n || vals[i] >= vals[i + 1];
    if (!left_ok || !right_ok) continue;
    if (i > 0 && i + 1 < n && vals[i] == vals[i - 1] && vals[i] == vals[i + 1]) continue;
    const double a = i > 0 ? seeds[i - 1] : seeds[i];
    const double b = i + 1 < n ? seeds[i + 1] : seeds[i];
    if (!(b > a)) continue;
    double x;
    const double v = golden_max(h, a, b, &x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  if (argmax) *argmax = best_x;
  return best;
}

std::vector<double> vertical_line_seeds(double alpha, const QuadConfig& cfg, const std::vector<double>& hints) {
  const int m = std::max(cfg.sup_seeds, 4);
  const double lo = 1e-3 * std::min(alpha, 1.0);
  const double hi = std::max(cfg.beta_max, 10.0 * lo);
  std::vector<double> seeds{0.0};
  seeds.reserve(2 * m + 4 + 10 * hints.size());
  const double step = std::log(hi / lo) / m;
  for (int j = 0; j <= m; ++j) {
    const double b = lo * std::exp(step * j);
    seeds.push_back(b);
    seeds.push_back(-b);
  }
  for (double c : hints) {
    seeds.push_back(c);
    for (double k : {0.5, 1.0, 2.0, 4.0}) {
      seeds.push_back(c - k * alpha);
      seeds.push_back(c + k * alpha);
    }
  }
  return seeds;
}

double sup_on_vertical_line(const std::function<double(double)>& h, double alpha, const QuadConfig& cfg,
                            const std::vector<double>& hints) {
  return multistart_max(h, vertical_line_seeds(alpha, cfg, hints));
}

}  // namespace opcalc::quad
