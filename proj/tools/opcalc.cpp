#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "opcalc/calculi.hpp"
#include "opcalc/errors.hpp"
#include "opcalc/norms.hpp"
#include "opcalc/parse.hpp"
#include "opcalc/verify.hpp"

using namespace opcalc;

namespace {

constexpr int kViolation = 2;
constexpr int kUsage = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string cnum(cplx z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.12g%+.12gi", z.real(), z.imag());
  return buf;
}

int cmd_norm(const std::string& space_text, const std::string& fn, double tol, bool json) {
  Space space;
  HolFunction f;
  try {
    space = Space::parse(space_text);
    f = parse_function(fn);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  quad::QuadConfig cfg;
  cfg.rel_tol = tol;
  const NormReport r = compute_norm(space, f, cfg);
  if (json) {
    nlohmann::json j{{"space", r.space.describe()},
                     {"function", f.describe()},
                     {"value", r.value.value},
                     {"error_est", r.value.error_est},
                     {"verdict", quad::to_string(r.value.verdict)},
                     {"membership", to_string(r.membership)},
                     {"evaluations", r.value.evaluations}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%s norm of %s = %.12g (error %.3g, %s, membership %s)\n", r.space.describe().c_str(),
                f.describe().c_str(), r.value.value, r.value.error_est, quad::to_string(r.value.verdict),
                to_string(r.membership));
  }
  return 0;
}

struct ApplyOptions {
  std::string calculus = "B";
  std::string fn;
  std::string measure;
  std::string op;
  double s = 1.0;
  double psi = kPi / 4;
  std::string form = "arccot";
  double tol = 1e-6;
  bool skip_checks = false;
  bool json = false;
};

int cmd_apply(const ApplyOptions& o) {
  MatrixOperator A = diag_operator({1.0});
  std::optional<HolFunction> f;
  std::optional<RadonMeasure> mu;
  try {
    A = parse_operator(o.op);
    if (!o.fn.empty()) f = parse_function(o.fn);
    if (!o.measure.empty()) mu = parse_measure(o.measure);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  if (f.has_value() == mu.has_value()) throw UsageError("give exactly one of --fn and --measure");
  if (mu && o.calculus != "HP") throw UsageError("--measure requires --calculus HP");
  CalculusConfig cfg;
  cfg.quad.rel_tol = o.tol;
  cfg.verify_preconditions = !o.skip_checks;
  CalculusResult r;
  if (o.calculus == "HP") {
    r = mu ? hp_calculus(A, *mu, cfg) : hp_calculus(A, *f, cfg);
  } else if (o.calculus == "B") {
    r = b_calculus(A, *f, cfg);
  } else if (o.calculus == "D") {
    r = d_calculus(A, *f, o.s, cfg);
  } else if (o.calculus == "H") {
    if (o.form != "arccot" && o.form != "fractional") throw UsageError("--form must be arccot or fractional");
    r = h_calculus(A, *f, o.psi, o.form == "arccot" ? HForm::Arccot : HForm::FractionalResolvent, cfg);
  } else {
    throw UsageError("--calculus must be one of HP, B, D, H");
  }
  const auto& d = r.diagnostics;
  if (o.json) {
    nlohmann::json j{{"method", r.describe_method()},
                     {"function", f ? f->describe() : std::string("laplace(") + o.measure + ")"},
                     {"operator", o.op},
                     {"matrix", matrix_to_json(r.matrix)},
                     {"norm", op_norm(r.matrix)},
                     {"diagnostics",
                      {{"outer_evaluations", d.outer_evaluations},
                       {"inner_evaluations", d.inner_evaluations},
                       {"inner_error", d.inner_error},
                       {"error_est", d.error_est},
                       {"alpha_min", d.alpha_min},
                       {"alpha_max", d.alpha_max},
                       {"beta_max", d.beta_max},
                       {"verdict", quad::to_string(d.verdict)}}},
                     {"oracle_gap", r.oracle_gap ? nlohmann::json(*r.oracle_gap) : nlohmann::json(nullptr)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("%s, ||f(A)|| = %.12g, error %.3g, %s\n", r.describe_method().c_str(), op_norm(r.matrix), d.error_est,
                quad::to_string(d.verdict));
    for (int i = 0; i < r.matrix.rows(); ++i) {
      for (int k = 0; k < r.matrix.cols(); ++k) std::printf("%s%s", k ? "  " : "", cnum(r.matrix(i, k)).c_str());
      std::printf("\n");
    }
    if (r.oracle_gap) std::printf("oracle gap %.3g\n", *r.oracle_gap);
  }
  return 0;
}

int cmd_verify(const std::string& name, std::uint64_t seed, const std::string& config, const std::string& out) {
  nlohmann::json cfg = nlohmann::json::object();
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw UsageError("cannot read config file " + config);
    try {
      cfg = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  }
  std::vector<std::string> names;
  if (name == "all") {
    names = verify::experiment_names();
  } else {
    const auto& known = verify::experiment_names();
    if (std::find(known.begin(), known.end(), name) == known.end()) throw UsageError("unknown experiment '" + name + "'");
    names = {name};
  }
  bool violated = false;
  for (const auto& n : names) {
    verify::ExperimentSpec spec;
    spec.name = n;
    spec.seed = seed;
    // Per-experiment sections take precedence; otherwise a flat object applies to a single experiment.
    if (cfg.contains(n)) {
      spec.params = cfg.at(n);
    } else if (name != "all") {
      spec.params = cfg;
    }
    if (!out.empty()) spec.output = names.size() > 1 ? std::filesystem::path(out) / n : std::filesystem::path(out);
    verify::Report r;
    try {
      r = verify::run(spec);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    for (const auto& c : r.claims) {
      std::printf("%-13s %s: measured %.6g %s %.6g [%s]%s%s\n",
                  (std::string("[") + verify::to_string(c.status) + "]").c_str(), c.name.c_str(), c.measured,
                  c.relation.c_str(), c.bound, verify::to_string(c.source), c.detail.empty() ? "" : " ",
                  c.detail.c_str());
    }
    std::printf("%s: %s (%.1f s)\n", n.c_str(), verify::to_string(r.status()), r.timings.at("total"));
    violated = violated || r.status() == verify::Status::Fail;
  }
  return violated ? kViolation : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional calculi for sectorial matrices: norms, calculi and verification experiments"};
  app.require_subcommand(1);

  auto* norm = app.add_subcommand("norm", "Compute a function-space norm");
  std::string space = "B", fn;
  double tol = 1e-8;
  bool json = false;
  norm->add_option("--space", space, "B0, B, W, E0, E, HP, Ds(s), DsInf(s), H1Sector(psi), HPsi(psi)");
  norm->add_option("--fn", fn, "Function expression, e.g. cayley^16")->required();
  norm->add_option("--tol", tol, "Relative tolerance")->check(CLI::PositiveNumber);
  norm->add_flag("--json", json, "Print JSON");

  auto* apply = app.add_subcommand("apply", "Apply a functional calculus to a matrix");
  ApplyOptions ao;
  apply->add_option("--calculus", ao.calculus, "HP, B, D or H");
  apply->add_option("--fn", ao.fn, "Function expression");
  apply->add_option("--measure", ao.measure, "Measure expression (HP only), e.g. dirac(0) - 2*expdec(1)");
  apply->add_option("--op", ao.op, "Operator, e.g. random_hilbert_contraction_gen(6, seed=7)")->required();
  apply->add_option("--s", ao.s, "Order s of the D calculus");
  apply->add_option("--psi", ao.psi, "Sector half-angle of the H calculus");
  apply->add_option("--form", ao.form, "H calculus form: arccot or fractional");
  apply->add_option("--tol", ao.tol, "Relative tolerance")->check(CLI::PositiveNumber);
  apply->add_flag("--skip-checks", ao.skip_checks, "Skip the norm-based precondition checks");
  apply->add_flag("--json", ao.json, "Print JSON");

  auto* ver = app.add_subcommand("verify", "Run a verification experiment (or all)");
  std::string experiment, config, out;
  std::uint64_t seed = 1;
  ver->add_option("experiment", experiment, "Experiment name or 'all'")->required();
  ver->add_option("--seed", seed, "Seed for random matrices");
  ver->add_option("--config", config, "JSON parameter file");
  ver->add_option("--out", out, "Output directory");
  ver->footer([] {
    std::string s = "Experiments:";
    for (const auto& n : verify::experiment_names()) s += " " + n;
    return s;
  }());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  try {
    if (*norm) return cmd_norm(space, fn, tol, json);
    if (*apply) return cmd_apply(ao);
    return cmd_verify(experiment, seed, config, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
