#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopfield/network.hpp"
#include "loopfield/report.hpp"
#include "loopfield/stats.hpp"

namespace loopfield {

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, std::string key = {})
      : std::invalid_argument(what), field(std::move(key)) {}
  std::string field;  // offending key, empty if not tied to one
};

/// One experiment run. Everything apart from the common keys below lives in
/// `parameters` and is validated by the experiment itself.
///
/// Common keys: experiment, network, seed, replicas, max_abs_z, min_ks_p.
struct ExperimentConfig {
  std::string experiment;
  nlohmann::ordered_json network;  // network spec, null if not needed
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> replicas;
  Thresholds thresholds;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
};

/// Parses a JSON config. Errors name the offending field and, when the text
/// is available, its line.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// load_config + run_experiment; parameter errors get the key's line.
Report run_config_file(const std::string& path);

std::vector<std::string> experiment_names();

/// Dispatches to the verifier of config.experiment. The report's config echo
/// holds every parameter with its default filled in.
Report run_experiment(const ExperimentConfig& config);

// Sample writers behind the CLI (CSV, one row per replica).
void write_green_csv(const Network& net, std::ostream& out);
void write_gff_samples(const Network& net, std::uint64_t replicas, std::uint64_t seed,
                       std::ostream& out);
void write_loop_samples(const Network& net, double alpha, std::uint64_t replicas,
                        std::uint64_t seed, double length_cutoff_eps, std::ostream& out);
void write_coupled_samples(const Network& net, std::uint64_t replicas, std::uint64_t seed,
                           double length_cutoff_eps, std::ostream& out);

/// Report rows as CSV: test, exact, statistic, stderr, z, p, pass.
void write_report_csv(const Report& report, std::ostream& out);

}  // namespace loopfield
