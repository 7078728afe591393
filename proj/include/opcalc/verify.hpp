#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace opcalc::verify {

enum class Status { Pass, Fail, Inconclusive };
const char* to_string(Status s);

// Where a bound comes from: a stated inequality, a constant derived here, or an exact identity.
enum class Source { Stated, Derived, Exact };
const char* to_string(Source s);

struct Claim {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  // "<=", ">=", "==" (within tolerance) or "spread<=".
  std::string relation = "<=";
  double tolerance = 0.0;
  Source source = Source::Stated;
  Status status = Status::Pass;
  std::string detail;
};

// One CSV row: series name, parameter value, measured, bound, pass.
struct SeriesRow {
  std::string series;
  double param = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = true;
};

struct ExperimentSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::filesystem::path output;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::vector<Claim> claims;
  std::vector<SeriesRow> series;
  // Reported values that carry no pass/fail verdict (fitted exponents, constants).
  std::vector<std::pair<std::string, double>> measurements;
  // Wall-clock seconds per phase; kept out of the report files.
  std::map<std::string, double> timings;

  Status status() const;  // Fail if any claim fails, else Pass (Inconclusive claims do not fail a report)
  nlohmann::json to_json() const;
  std::string to_csv() const;
  // Writes report.json, series.csv and timings.json into dir.
  void write(const std::filesystem::path& dir) const;
};

const std::vector<std::string>& experiment_names();

// Throws UnknownExperiment for unrecognized names. Unset params take their defaults.
Report run(const ExperimentSpec& spec);

// Default parameters of an experiment.
nlohmann::json default_params(const std::string& name);

}  // namespace opcalc::verify
