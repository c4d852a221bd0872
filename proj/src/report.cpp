#include "loopfield/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace loopfield {

bool Report::all_pass() const {
  return std::all_of(tests.begin(), tests.end(), [](const TestRecord& t) { return t.pass; });
}

void Report::append(const Report& other) {
  tests.insert(tests.end(), other.tests.begin(), other.tests.end());
}

TestRecord z_record(std::string id, std::string formula, std::optional<double> exact,
                    double estimate, double standard_error, double z, double max_abs_z) {
  TestRecord r;
  r.id = std::move(id);
  r.formula = std::move(formula);
  r.exact = exact;
  r.estimate = estimate;
  r.standard_error = standard_error;
  r.z = z;
  r.pass = std::abs(z) < max_abs_z;
  return r;
}

TestRecord ks_record(std::string id, std::string formula, double statistic, double p,
                     double min_p) {
  TestRecord r;
  r.id = std::move(id);
  r.formula = std::move(formula);
  r.estimate = statistic;
  r.p = p;
  r.pass = p > min_p;
  return r;
}

TestRecord count_record(std::string id, std::string formula, double expected, double observed) {
  TestRecord r;
  r.id = std::move(id);
  r.formula = std::move(formula);
  r.exact = expected;
  r.estimate = observed;
  r.pass = observed == expected;
  return r;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

nlohmann::ordered_json to_json(const TestRecord& record) {
  nlohmann::ordered_json j;
  j["test"] = record.id;
  j["formula"] = record.formula;
  j["exact"] = record.exact ? number(*record.exact) : nullptr;
  j["statistic"] = number(record.estimate);
  j["stderr"] = number(record.standard_error);
  j["z"] = record.z ? number(*record.z) : nullptr;
  j["p"] = record.p ? number(*record.p) : nullptr;
  j["pass"] = record.pass;
  return j;
}

nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["seed"] = report.seed;
  j["config"] = report.config;
  j["all_pass"] = report.all_pass();
  auto& tests = j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tests) tests.push_back(to_json(t));
  return j;
}

std::string dump_report(const Report& report) { return to_json(report).dump(2) + "\n"; }

}  // namespace loopfield
