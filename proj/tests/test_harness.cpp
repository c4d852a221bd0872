#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "loopfield/experiments.hpp"
#include "loopfield/network_io.hpp"
#include "loopfield/replicas.hpp"
#include "loopfield/stats.hpp"

using namespace loopfield;

TEST_CASE("derived streams") {
  RandomStream a = derive_stream(42, 0), b = derive_stream(42, 1), c = derive_stream(42, 0);
  const auto a0 = a(), b0 = b(), c0 = c();
  CHECK(a0 != b0);
  CHECK(a0 == c0);
  CHECK(derive_stream(42, 0)() != derive_stream(43, 0)());

  // First uniforms across consecutive indices, and a long run of one stream.
  std::vector<double> across, along;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    RandomStream s = derive_stream(7, i);
    across.push_back(uniform01(s));
  }
  RandomStream s = derive_stream(7, 0);
  for (int i = 0; i < 100000; ++i) along.push_back(uniform01(s));
  CHECK(uniformity_p_value(across, 16) > 1e-4);
  CHECK(uniformity_p_value(along, 16) > 1e-4);
}

TEST_CASE("replica runner does not depend on threads or blocks") {
  auto run = [](Execution exec, std::uint64_t block) {
    std::vector<double> out;
    run_replicas(
        5000, 3, [](std::uint64_t i, RandomStream& rng) { return uniform01(rng) + double(i); },
        [&](std::uint64_t, double v) { out.push_back(v); }, exec, block);
    return out;
  };
  set_thread_count(4);
  const auto serial = run(Execution::serial, 2048);
  CHECK(run(Execution::parallel, 2048) == serial);
  CHECK(run(Execution::parallel, 7) == serial);
  set_thread_count(1);
}

TEST_CASE("statistics helpers") {
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(chi_square_p_value(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  const std::size_t n = 1000000;
  CHECK(ks_p_value(1.3580986393225505 / std::sqrt(double(n)), n) ==
        doctest::Approx(0.05).epsilon(2e-3));
  CHECK(ks_p_value(0.0, 100) == doctest::Approx(1.0));
  RunningStats s;
  for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
  CHECK(s.mean() == 2.5);
  CHECK(s.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(z_score(1.0, 1.0, 0.0) == 0.0);
  CHECK(binomial_standard_error(0.5, 100) == doctest::Approx(0.05));
}

TEST_CASE("csv dialect") {
  std::ostringstream out;
  CsvWriter csv(out, {"a", "b", "c"});
  csv.cell(0.1).cell(1.0 / 3.0).cell(std::string("x,y")).end_row();
  CHECK(out.str() == "a,b,c\n0.10000000000000001,0.33333333333333331,\"x,y\"\n");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  csv.cell(1.0);
  CHECK_THROWS_AS(csv.end_row(), std::logic_error);
}

TEST_CASE("config parsing and diagnostics") {
  const auto config = parse_config(
      R"({"experiment": "det-ratio", "network": {"path": {"count": 2, "C": 1, "kappa": 1}},
          "seed": 5, "replicas": 1000, "max_abs_z": 4.5, "edges": [0]})");
  CHECK(config.experiment == "det-ratio");
  CHECK(config.seed == 5);
  CHECK(*config.replicas == 1000);
  CHECK(config.thresholds.max_abs_z == 4.5);
  CHECK(config.parameters["edges"][0] == 0);

  auto message = [](const std::string& text) {
    try {
      parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{\"experiment\": \"nope\"}").find("unknown experiment") != std::string::npos);
  CHECK(message("{\n\"experiment\": \"det-ratio\",\n\"replicas\": 0}").find("cfg.json:3") == 0);
  CHECK(message("{\n\"experiment\": \n}").find("cfg.json:3") == 0);
  CHECK(message("{\"seed\": 1}").find("'experiment'") != std::string::npos);

  ExperimentConfig bad = config;
  bad.parameters["alpha"] = 0.3;
  try {
    run_experiment(bad);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.field == "alpha");
  }
}

TEST_CASE("config file errors carry the line of the key") {
  const std::string path = "harness_bad_config.json";
  {
    std::ofstream out(path);
    out << "{\n  \"experiment\": \"bridge-check\",\n  \"replicas\": 10,\n  \"T\": -1\n}\n";
  }
  try {
    run_config_file(path);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(path + ":4:") == 0);
  }
  std::remove(path.c_str());
}

TEST_CASE("reports are byte-identical for a fixed seed") {
  const auto config = parse_config(
      R"({"experiment": "connectivity", "network": {"path": {"count": 2, "C": 1, "kappa": 1}},
          "seed": 9, "replicas": 3000})");
  set_thread_count(3);
  const std::string a = dump_report(run_experiment(config));
  set_thread_count(1);
  const std::string b = dump_report(run_experiment(config));
  CHECK(a == b);
  CHECK(a.find("\"config\"") != std::string::npos);
  auto other = config;
  other.seed = 10;
  CHECK(dump_report(run_experiment(other)) != a);
}

TEST_CASE("every experiment runs from a one-line config") {
  const std::vector<std::string> lines = {
      R"({"experiment":"connectivity","network":{"path":{"count":2,"C":1,"kappa":1}},"replicas":500})",
      R"({"experiment":"det-ratio","network":{"path":{"count":2,"C":1,"kappa":1}},"replicas":500})",
      R"({"experiment":"coupling-law","network":{"path":{"count":3,"C":1,"kappa":1}},"replicas":500})",
      R"({"experiment":"occupation-identity","network":{"path":{"count":2,"C":1,"kappa":1}},"replicas":500})",
      R"({"experiment":"bridge-check","replicas":500})",
      R"({"experiment":"interlacement","d":2,"n":4,"r":1,"sets":[[[0,0]]],"replicas":200,"star_replicas":50})",
      R"({"experiment":"isomorphism-check","d":2,"n":2,"replicas":200})",
      R"({"experiment":"levelset-check","d":2,"n":2,"replicas":200})"};
  CHECK(lines.size() == experiment_names().size());
  for (const auto& line : lines) {
    INFO(line);
    const Report r = run_experiment(parse_config(line));
    CHECK(!r.tests.empty());
  }
}
