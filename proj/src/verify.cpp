#include "opcalc/verify.hpp"

#include <cstdio>
#include <fstream>

#include "opcalc/errors.hpp"

namespace opcalc::verify {

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

const char* to_string(Source s) {
  switch (s) {
    case Source::Stated:
      return "stated";
    case Source::Derived:
      return "derived";
    case Source::Exact:
      return "exact";
  }
  return "?";
}

Status Report::status() const {
  for (const auto& c : claims)
    if (c.status == Status::Fail) return Status::Fail;
  return Status::Pass;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["params"] = params;
  nlohmann::json cs = nlohmann::json::array();
  int pass = 0, fail = 0, inconclusive = 0;
  for (const auto& c : claims) {
    cs.push_back({{"claim", c.name},
                  {"measured", c.measured},
                  {"relation", c.relation},
                  {"bound", c.bound},
                  {"tolerance", c.tolerance},
                  {"source", to_string(c.source)},
                  {"status", to_string(c.status)},
                  {"detail", c.detail}});
    (c.status == Status::Pass ? pass : c.status == Status::Fail ? fail : inconclusive)++;
  }
  j["claims"] = cs;
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& [k, v] : measurements) ms.push_back({{"name", k}, {"value", v}});
  j["measurements"] = ms;
  j["summary"] = {{"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}, {"status", to_string(status())}};
  return j;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string Report::to_csv() const {
  std::string out = "series,param,measured,bound,pass\n";
  for (const auto& r : series) {
    out += r.series + "," + fmt(r.param) + "," + fmt(r.measured) + "," + fmt(r.bound) + "," + (r.pass ? "1" : "0") + "\n";
  }
  return out;
}

void Report::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  put("report.json", to_json().dump(2) + "\n");
  put("series.csv", to_csv());
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [k, v] : timings) t[k] = v;
  put("timings.json", nlohmann::json{{"experiment", experiment}, {"seconds", t}}.dump(2) + "\n");
}

}  // namespace opcalc::verify
