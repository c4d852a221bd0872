#include "loopfield/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "loopfield/bridges.hpp"
#include "loopfield/coupling.hpp"
#include "loopfield/gff.hpp"
#include "loopfield/green.hpp"
#include "loopfield/interlacement.hpp"
#include "loopfield/loop_soup.hpp"
#include "loopfield/network_io.hpp"
#include "loopfield/replicas.hpp"

namespace loopfield {

namespace {

using ojson = nlohmann::ordered_json;

const std::set<std::string> kCommonKeys = {"experiment", "network", "seed",
                                           "replicas",   "max_abs_z", "min_ks_p"};

std::size_t line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::size_t line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  return pos == std::string::npos ? 0 : line_of(text, pos);
}

[[noreturn]] void field_error(const std::string& experiment, const std::string& key,
                              const std::string& what) {
  throw ConfigError(experiment + ": field '" + key + "' " + what, key);
}

/// Reads parameters with defaults and records the resolved values.
class Params {
 public:
  Params(const ExperimentConfig& config, ojson& echo)
      : given_(config.parameters), name_(config.experiment), echo_(echo) {}

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    T value = fallback;
    if (given_.contains(key)) value = convert<T>(key);
    echo_[key] = value;
    return value;
  }

  /// Number or list of numbers.
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    seen_.insert(key);
    if (given_.contains(key) && given_[key].is_number()) {
      fallback = {given_[key].get<double>()};
    } else if (given_.contains(key)) {
      fallback = convert<std::vector<double>>(key);
    }
    echo_[key] = fallback;
    return fallback;
  }

  void finish() const {
    for (const auto& [key, value] : given_.items()) {
      if (!seen_.count(key)) field_error(name_, key, "is not a parameter of this experiment");
    }
  }

 private:
  template <class T>
  T convert(const std::string& key) const {
    const auto& v = given_[key];
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) field_error(name_, key, "must be a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) field_error(name_, key, "must be an integer");
    }
    try {
      return v.template get<T>();
    } catch (const nlohmann::json::exception&) {
      field_error(name_, key, "has the wrong type");
    }
  }

  const ojson& given_;
  std::string name_;
  ojson& echo_;
  std::set<std::string> seen_;
};

void require_positive(const std::string& experiment, const std::string& key, double value) {
  if (!(value > 0.0)) field_error(experiment, key, "must be positive");
}

Network network_of(const ExperimentConfig& config) {
  if (config.network.is_null()) field_error(config.experiment, "network", "is required");
  try {
    return network_from_spec(config.network);
  } catch (const NetworkError& e) {
    field_error(config.experiment, "network", std::string("is invalid: ") + e.what());
  }
}

void no_network(const ExperimentConfig& config) {
  if (!config.network.is_null()) {
    field_error(config.experiment, "network", "is not used by this experiment");
  }
}

Report with_prefix(Report report, const std::string& prefix) {
  for (auto& t : report.tests) t.id = prefix + t.id;
  return report;
}

std::string level_tag(double u) { return "u=" + ojson(u).dump() + "/"; }

Report connectivity_experiment(const ExperimentConfig& config, ojson& echo) {
  const Network net = network_of(config);
  Params p(config, echo);
  const auto x = p.get<VertexId>("x", 0);
  const auto y = p.get<VertexId>("y", 1);
  p.finish();
  if (x >= net.vertex_count()) field_error(config.experiment, "x", "is not a vertex");
  if (y >= net.vertex_count()) field_error(config.experiment, "y", "is not a vertex");
  const GreenOperator gop(net);
  const auto est = estimate_connectivity(net, gop, x, y, config.replicas.value_or(100000),
                                         config.seed);
  return connectivity_report(est, config.thresholds);
}

Report det_ratio_experiment(const ExperimentConfig& config, ojson& echo) {
  const Network net = network_of(config);
  Params p(config, echo);
  const auto edges = p.get<std::vector<EdgeId>>("edges", {0});
  const double eps = p.get<double>("eps", 1e-7);
  p.finish();
  for (EdgeId e : edges) {
    if (e >= net.edge_count()) field_error(config.experiment, "edges", "names a missing edge");
  }
  const double exact = sqrt_det_ratio(net, edges);
  const LoopSampler sampler(net, eps);
  RunningStats avoided;
  run_replicas(
      config.replicas.value_or(100000), config.seed,
      [&](std::uint64_t, RandomStream& rng) {
        const auto crossed = traversed_edges(sampler.sample(0.5, rng), net);
        const bool hit = std::any_of(edges.begin(), edges.end(), [&](EdgeId e) {
          return std::binary_search(crossed.begin(), crossed.end(), e);
        });
        return hit ? 0.0 : 1.0;
      },
      [&](std::uint64_t, double v) { avoided.add(v); });
  Report report;
  const double se = binomial_standard_error(avoided.mean(), avoided.count());
  report.add(z_record("edge_avoidance", "P(no loop crosses the edges) = sqrt(det G^(e) / det G)",
                      exact, avoided.mean(), se, z_score(avoided.mean(), exact, se),
                      config.thresholds.max_abs_z));
  return report;
}

Report coupling_experiment(const ExperimentConfig& config, ojson& echo) {
  const Network net = network_of(config);
  Params p(config, echo);
  CouplingCheckOptions options;
  options.length_cutoff_eps = p.get<double>("eps", 1e-7);
  const auto edge = p.get<long long>("designated_edge", 0);
  p.finish();
  options.designated_edge =
      edge < 0 ? std::nullopt : std::optional<EdgeId>(static_cast<EdgeId>(edge));
  options.replicas = config.replicas.value_or(100000);
  options.seed = config.seed;
  options.thresholds = config.thresholds;
  const GreenOperator gop(net);
  return verify_gff_law(net, gop, options);
}

Report occupation_experiment(const ExperimentConfig& config, ojson& echo) {
  const Network net = network_of(config);
  Params p(config, echo);
  const double eps = p.get<double>("eps", 1e-7);
  p.finish();
  const GreenOperator gop(net);
  const LoopSampler sampler(net, gop, eps);
  const std::size_t n = net.vertex_count();
  const auto replicas = config.replicas.value_or(100000);
  std::vector<std::vector<double>> samples(n);
  std::vector<RunningStats> products(n * n);
  run_replicas(
      replicas, config.seed,
      [&](std::uint64_t, RandomStream& rng) {
        return occupation_field(sampler.sample(0.5, rng)).values;
      },
      [&](std::uint64_t, std::vector<double> l) {
        for (std::size_t x = 0; x < n; ++x) {
          samples[x].push_back(l[x]);
          for (std::size_t y = x; y < n; ++y) products[x * n + y].add(l[x] * l[y]);
        }
      });
  Report report;
  const auto& th = config.thresholds;
  for (std::size_t x = 0; x < n; ++x) {
    const double g = gop(x, x);
    const double d = ks_statistic(samples[x], [g](double t) {
      return t <= 0.0 ? 0.0 : std::erf(std::sqrt(t / g));
    });
    report.add(ks_record("occupation_law[" + std::to_string(x) + "]",
                         "L_x at alpha = 1/2 has the law of phi_x^2/2", d,
                         ks_p_value(d, samples[x].size()), th.min_ks_p));
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x; y < n; ++y) {
      const double gxy = gop(x, y);
      const double exact = (gop(x, x) * gop(y, y) + 2.0 * gxy * gxy) / 4.0;
      const auto& s = products[x * n + y];
      report.add(z_record("cross_moment[" + std::to_string(x) + "," + std::to_string(y) + "]",
                          "E[L_x L_y] = (G(x,x) G(y,y) + 2 G(x,y)^2) / 4", exact, s.mean(),
                          s.standard_error(), z_score(s.mean(), exact, s.standard_error()),
                          th.max_abs_z));
    }
  }
  return report;
}

Report bridge_experiment(const ExperimentConfig& config, ojson& echo) {
  no_network(config);
  Params p(config, echo);
  const auto lambdas = p.numbers("lambdas", {1e-4, 1e-2, 0.25, 1.0, 4.0, 25.0});
  const double length = p.get<double>("T", 1.0);
  const double ratio = p.get<double>("ratio", 1.0);
  const double rel_tol = p.get<double>("rel_tol", 1e-8);
  p.finish();
  require_positive(config.experiment, "T", length);
  require_positive(config.experiment, "ratio", ratio);
  require_positive(config.experiment, "rel_tol", rel_tol);
  Report report;
  const auto replicas = config.replicas.value_or(100000);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    require_positive(config.experiment, "lambdas", lambda);
    // l1 l2 = 4 T^2 lambda with l1 = ratio * l2
    const double l2 = std::sqrt(4.0 * length * length * lambda / ratio);
    const BridgeProblem problem(length, ratio * l2, l2);
    const double closed = zero_probability_closed_form(problem);
    const std::string tag = "[" + format_double(lambda) + "]";
    TestRecord quad;
    quad.id = "quadrature" + tag;
    quad.formula = "int_0^inf exp(-lambda/s - s) ds / sqrt(s) = sqrt(pi) exp(-2 sqrt(lambda))";
    quad.exact = closed;
    try {
      quad.estimate = zero_probability_quadrature(problem, 1e-12);
    } catch (const QuadratureError& e) {
      quad.estimate = std::numeric_limits<double>::quiet_NaN();
    }
    quad.standard_error = std::abs(quad.estimate - closed) / closed;
    quad.pass = quad.standard_error < rel_tol;
    report.add(quad);
    const auto mc = three_process_zero_mc(problem, replicas, config.seed + i);
    report.add(z_record("three_process" + tag, "P(first zero <= last zero) = exp(-2 sqrt(lambda))",
                        closed, mc.probability, mc.standard_error,
                        z_score(mc.probability, closed, mc.standard_error),
                        config.thresholds.max_abs_z));
  }
  return report;
}

Report interlacement_experiment(const ExperimentConfig& config, ojson& echo) {
  no_network(config);
  Params p(config, echo);
  InterlacementCheckOptions options;
  options.dimension = p.get<int>("d", 3);
  options.half_width = p.get<int>("n", 8);
  options.window_radius = p.get<int>("r", 2);
  options.u = p.get<double>("u", 1.0);
  options.vacancy_sets = p.get<std::vector<std::vector<std::vector<int>>>>(
      "sets", {{{0, 0, 0}}, {{0, 0, 0}, {1, 0, 0}}});
  options.star_replicas = p.get<std::uint64_t>("star_replicas", 20000);
  p.finish();
  require_positive(config.experiment, "u", options.u);
  for (const auto& set : options.vacancy_sets) {
    for (const auto& c : set) {
      if (c.size() != static_cast<std::size_t>(options.dimension)) {
        field_error(config.experiment, "sets", "holds a point of the wrong dimension");
      }
    }
  }
  options.replicas = config.replicas.value_or(100000);
  options.seed = config.seed;
  options.thresholds = config.thresholds;
  try {
    return interlacement_check(options);
  } catch (const CapacityError& e) {
    field_error(config.experiment, "sets", std::string("is invalid: ") + e.what());
  }
}

Report isomorphism_experiment(const ExperimentConfig& config, ojson& echo) {
  no_network(config);
  Params p(config, echo);
  const int d = p.get<int>("d", 2);
  const int n = p.get<int>("n", 5);
  const auto levels = p.numbers("u", {0.5, 1.0});
  p.finish();
  const StarGraph star = build_star_graph(d, n);
  Report report;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0)) field_error(config.experiment, "u", "must be non-negative");
    report.append(with_prefix(isomorphism_check(star, levels[i], config.replicas.value_or(100000),
                                                config.seed + i, config.thresholds),
                              level_tag(levels[i])));
  }
  return report;
}

Report levelset_experiment(const ExperimentConfig& config, ojson& echo) {
  no_network(config);
  Params p(config, echo);
  const int d = p.get<int>("d", 2);
  const int n = p.get<int>("n", 5);
  const auto levels = p.numbers("u", {0.1, 1.0});
  const double eps = p.get<double>("eps", 1e-7);
  p.finish();
  const StarGraph star = build_star_graph(d, n);
  Report report;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    require_positive(config.experiment, "u", levels[i]);
    report.append(with_prefix(
        levelset_containment_check(star, levels[i], config.replicas.value_or(10000),
                                   config.seed + i, config.thresholds, eps),
        level_tag(levels[i])));
  }
  return report;
}

using Runner = std::function<Report(const ExperimentConfig&, ojson&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"bridge-check", bridge_experiment},
      {"coupling-law", coupling_experiment},
      {"connectivity", connectivity_experiment},
      {"det-ratio", det_ratio_experiment},
      {"interlacement", interlacement_experiment},
      {"isomorphism-check", isomorphism_experiment},
      {"levelset-check", levelset_experiment},
      {"occupation-identity", occupation_experiment},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  auto fail = [&](const std::string& key, const std::string& what) -> void {
    const auto line = line_of_key(text, key);
    throw ConfigError(source + (line ? ":" + std::to_string(line) : std::string()) +
                      ": field '" + key + "' " + what);
  };
  if (!doc.is_object()) throw ConfigError(source + ": expected a JSON object");
  ExperimentConfig config;
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    fail("experiment", "is required and must be a string");
  }
  config.experiment = doc["experiment"].get<std::string>();
  if (!runners().count(config.experiment)) fail("experiment", "names an unknown experiment");
  if (doc.contains("network")) config.network = doc["network"];
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "must be a non-negative 64-bit integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("replicas")) {
    if (!doc["replicas"].is_number_unsigned() || doc["replicas"].get<std::uint64_t>() < 1) {
      fail("replicas", "must be an integer >= 1");
    }
    config.replicas = doc["replicas"].get<std::uint64_t>();
  }
  if (doc.contains("max_abs_z")) {
    if (!doc["max_abs_z"].is_number() || !(doc["max_abs_z"].get<double>() > 0.0)) {
      fail("max_abs_z", "must be a positive number");
    }
    config.thresholds.max_abs_z = doc["max_abs_z"].get<double>();
  }
  if (doc.contains("min_ks_p")) {
    const auto& v = doc["min_ks_p"];
    if (!v.is_number() || !(v.get<double>() >= 0.0 && v.get<double>() < 1.0)) {
      fail("min_ks_p", "must be a number in [0, 1)");
    }
    config.thresholds.min_ks_p = v.get<double>();
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kCommonKeys.count(key)) config.parameters[key] = value;
  }
  return config;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

Report run_config_file(const std::string& path) {
  const std::string text = read_file(path);
  const ExperimentConfig config = parse_config(text, path);
  try {
    return run_experiment(config);
  } catch (const ConfigError& e) {
    if (e.field.empty()) throw;
    const auto line = line_of_key(text, e.field);
    throw ConfigError(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + e.what(),
                      e.field);
  }
}

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
  ojson j;
  j["experiment"] = config.experiment;
  j["network"] = config.network;
  j["seed"] = config.seed;
  if (config.replicas) {
    j["replicas"] = *config.replicas;
  } else {
    j["replicas"] = nullptr;
  }
  j["max_abs_z"] = config.thresholds.max_abs_z;
  j["min_ks_p"] = config.thresholds.min_ks_p;
  for (const auto& [key, value] : config.parameters.items()) j[key] = value;
  return j;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [name, runner] : runners()) names.push_back(name);
  return names;
}

Report run_experiment(const ExperimentConfig& config) {
  const auto it = runners().find(config.experiment);
  if (it == runners().end()) {
    throw ConfigError("unknown experiment '" + config.experiment + "'");
  }
  ojson parameters = ojson::object();
  Report report = it->second(config, parameters);
  report.experiment = config.experiment;
  report.seed = config.seed;
  ojson echo = to_json(config);
  for (const auto& [key, value] : parameters.items()) echo[key] = value;
  // The verifiers may have stored derived quantities already.
  for (const auto& [key, value] : report.config.items()) echo[key] = value;
  report.config = std::move(echo);
  return report;
}

void write_green_csv(const Network& net, std::ostream& out) {
  const GreenOperator gop(net);
  CsvWriter csv(out, {"quantity", "i", "j", "value"});
  const std::size_t n = net.vertex_count();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      csv.cell(std::string("G")).cell(static_cast<long long>(x)).cell(static_cast<long long>(y));
      csv.cell(gop(x, y));
      csv.end_row();
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      csv.cell(std::string("g")).cell(static_cast<long long>(x)).cell(static_cast<long long>(y));
      csv.cell(normalized_green(gop, x, y));
      csv.end_row();
    }
  }
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    const EdgeId removed[] = {e};
    csv.cell(std::string("det_ratio"))
        .cell(static_cast<long long>(net.edge(e).u))
        .cell(static_cast<long long>(net.edge(e).v));
    csv.cell(sqrt_det_ratio(net, removed));
    csv.end_row();
  }
}

void write_gff_samples(const Network& net, std::uint64_t replicas, std::uint64_t seed,
                       std::ostream& out) {
  const GreenOperator gop(net);
  auto header = numbered_columns("phi", net.vertex_count());
  header.insert(header.begin(), {"replica", "cluster_count"});
  CsvWriter csv(out, header);
  struct Row {
    std::size_t clusters;
    std::vector<double> values;
  };
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        FieldSample field = sample_gff(gop, rng);
        const auto config = sample_edge_configuration(field, net, rng);
        return Row{cluster_edges(config, net).cluster_count(), std::move(field.values)};
      },
      [&](std::uint64_t i, Row row) {
        csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(row.clusters));
        csv.cells(row.values).end_row();
      });
}

void write_loop_samples(const Network& net, double alpha, std::uint64_t replicas,
                        std::uint64_t seed, double length_cutoff_eps, std::ostream& out) {
  const LoopSampler sampler(net, length_cutoff_eps);
  auto header = numbered_columns("L", net.vertex_count());
  header.insert(header.begin(), {"replica", "loop_count", "cluster_count"});
  CsvWriter csv(out, header);
  struct Row {
    std::size_t loops;
    std::size_t clusters;
    std::vector<double> values;
  };
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        const LoopSoupSample soup = sampler.sample(alpha, rng);
        return Row{soup.loops.size(), loop_clusters(soup, net).cluster_count(),
                   occupation_field(soup).values};
      },
      [&](std::uint64_t i, Row row) {
        csv.cell(static_cast<long long>(i))
            .cell(static_cast<long long>(row.loops))
            .cell(static_cast<long long>(row.clusters));
        csv.cells(row.values).end_row();
      });
}

void write_coupled_samples(const Network& net, std::uint64_t replicas, std::uint64_t seed,
                           double length_cutoff_eps, std::ostream& out) {
  const LoopSampler sampler(net, length_cutoff_eps);
  auto header = numbered_columns("phi", net.vertex_count());
  header.insert(header.begin(), {"replica", "loop_count", "cluster_count"});
  CsvWriter csv(out, header);
  struct Row {
    std::size_t loops;
    std::size_t clusters;
    std::vector<double> values;
  };
  run_replicas(
      replicas, seed,
      [&](std::uint64_t, RandomStream& rng) {
        CoupledSample cs = couple(net, sampler.sample(0.5, rng), rng);
        return Row{cs.soup.loops.size(), cs.merged_clusters.cluster_count(),
                   std::move(cs.field.values)};
      },
      [&](std::uint64_t i, Row row) {
        csv.cell(static_cast<long long>(i))
            .cell(static_cast<long long>(row.loops))
            .cell(static_cast<long long>(row.clusters));
        csv.cells(row.values).end_row();
      });
}

void write_report_csv(const Report& report, std::ostream& out) {
  CsvWriter csv(out, {"test", "exact", "statistic", "stderr", "z", "p", "pass"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& t : report.tests) {
    csv.cell(t.id).cell(t.exact.value_or(nan)).cell(t.estimate).cell(t.standard_error);
    csv.cell(t.z.value_or(nan)).cell(t.p.value_or(nan)).cell(std::string(t.pass ? "true" : "false"));
    csv.end_row();
  }
}

}  // namespace loopfield
