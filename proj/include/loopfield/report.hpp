#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace loopfield {

/// One statistical or structural check.
struct TestRecord {
  std::string id;
  std::string formula;  // the closed form or identity being checked
  std::optional<double> exact;
  double estimate = 0.0;
  double standard_error = 0.0;
  std::optional<double> z;
  std::optional<double> p;
  bool pass = false;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<TestRecord> tests;
  nlohmann::ordered_json config;
  double runtime_seconds = 0.0;  // not serialised

  bool all_pass() const;
  void append(const Report& other);
  void add(TestRecord record) { tests.push_back(std::move(record)); }
};

/// z-test record: pass iff |z| < threshold.
TestRecord z_record(std::string id, std::string formula, std::optional<double> exact,
                    double estimate, double standard_error, double z, double max_abs_z);
/// KS record: pass iff p > threshold.
TestRecord ks_record(std::string id, std::string formula, double statistic, double p,
                     double min_p);
/// Structural count that must equal `expected`.
TestRecord count_record(std::string id, std::string formula, double expected, double observed);

nlohmann::ordered_json to_json(const TestRecord& record);
nlohmann::ordered_json to_json(const Report& report);
/// Deterministic text form (fixed key order, 17 significant digits).
std::string dump_report(const Report& report);

/// %.17g, which round-trips every double; "inf"/"nan" spelled out.
std::string format_double(double value);

}  // namespace loopfield
