#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loopfield/experiments.hpp"
#include "loopfield/network_io.hpp"
#include "loopfield/replicas.hpp"

using namespace loopfield;
using ojson = nlohmann::ordered_json;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::uint64_t replicas = 0;  // 0: experiment default
  std::string out;
  int threads = 0;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(std::stod(s));
  return out;
}

/// "x,y,z;x,y,z|x,y,z": sets separated by '|', points by ';'.
ojson parse_sets(const std::string& text) {
  ojson sets = ojson::array();
  for (const auto& set : split(text, '|')) {
    ojson points = ojson::array();
    for (const auto& point : split(set, ';')) {
      ojson coords = ojson::array();
      for (const auto& c : split(point, ',')) coords.push_back(std::stoi(c));
      points.push_back(coords);
    }
    sets.push_back(points);
  }
  return sets;
}

/// A file name, or an inline JSON network spec.
ojson network_spec(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return ojson::parse(arg);
  return ojson{{"file", arg}};
}

Network load(const std::string& arg) { return network_from_spec(network_spec(arg)); }

std::uint64_t replicas_or(const Globals& g, std::uint64_t fallback) {
  return g.replicas ? g.replicas : fallback;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int finish(const Report& report, const std::string& json_path, double seconds) {
  if (json_path.empty()) {
    std::cout << dump_report(report);
  } else {
    Output out(json_path);
    out.stream() << dump_report(report);
    write_report_csv(report, std::cout);
  }
  std::size_t failed = 0;
  for (const auto& t : report.tests) failed += t.pass ? 0 : 1;
  std::fprintf(stderr, "%s: %zu tests, %zu failed, %.2f s\n", report.experiment.c_str(),
               report.tests.size(), failed, seconds);
  return report.all_pass() ? 0 : 1;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loop soups, free fields and interlacements on finite weighted graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--replicas", g.replicas, "Monte Carlo replicas (default per experiment)");
  app.add_option("--out", g.out, "Output path (CSV for samplers, JSON report for checks)");
  app.add_option("--threads", g.threads, "OpenMP threads (0: runtime default)");

  std::string net_arg, report_path, lambda_grid, sets_arg, iso_levels, ls_levels, edges_arg;
  double alpha = 0.5, eps = 1e-7, length = 1.0, ratio = 1.0, u = 1.0;
  VertexId x = 0, y = 1;
  int il_d = 3, il_n = 8, iso_d = 2, iso_n = 5, ls_d = 2, ls_n = 5, radius = 2;
  std::uint64_t star_replicas = 20000;

  auto* green = app.add_subcommand("green", "Print G, g and single-edge det ratios as CSV");
  green->add_option("--net", net_arg, "Network JSON file or inline document")->required();

  auto* sample_gff = app.add_subcommand("sample-gff", "Sample the vertex free field (CSV)");
  sample_gff->add_option("--net", net_arg)->required();

  auto* sample_loops = app.add_subcommand("sample-loops", "Sample loop soups (CSV)");
  sample_loops->add_option("--net", net_arg)->required();
  sample_loops->add_option("--alpha", alpha)->capture_default_str();
  sample_loops->add_option("--eps", eps, "Length cutoff tolerance")->capture_default_str();

  auto* couple = app.add_subcommand("couple", "Coupled fields to --out (CSV), law check as JSON");
  couple->add_option("--net", net_arg)->required();
  couple->add_option("--eps", eps)->capture_default_str();
  couple->add_option("--report", report_path, "JSON report path (default stdout)");

  auto* connectivity = app.add_subcommand("connectivity", "Cable connectivity vs arcsin law");
  connectivity->add_option("--net", net_arg)->required();
  connectivity->add_option("--x", x)->capture_default_str();
  connectivity->add_option("--y", y)->capture_default_str();

  auto* det_ratio = app.add_subcommand("det-ratio", "Loop edge avoidance vs sqrt det ratio");
  det_ratio->add_option("--net", net_arg)->required();
  det_ratio->add_option("--edges", edges_arg, "Comma-separated edge ids")->default_val("0");
  det_ratio->add_option("--eps", eps)->capture_default_str();

  auto* bridge = app.add_subcommand("bridge-check", "Bridge zero probability: closed form, "
                                                    "quadrature and three-process MC");
  bridge->add_option("--lambda-grid", lambda_grid, "Comma-separated lambdas")
      ->default_val("1e-4,1e-2,0.25,1,4,25");
  bridge->add_option("--T", length)->capture_default_str();
  bridge->add_option("--ratio", ratio, "l1 / l2")->capture_default_str();

  auto* interlacement = app.add_subcommand("interlacement", "Vacant set and occupation checks");
  interlacement->add_option("--d", il_d)->capture_default_str();
  interlacement->add_option("--n", il_n)->capture_default_str();
  interlacement->add_option("--r", radius, "Occupation window radius")->capture_default_str();
  interlacement->add_option("--u", u)->capture_default_str();
  interlacement->add_option("--k", sets_arg, "Sets K: \"x,y,z;x,y,z|x,y,z\"")
      ->default_val("0,0,0|0,0,0;1,0,0");
  interlacement->add_option("--star-replicas", star_replicas)->capture_default_str();

  auto* isomorphism = app.add_subcommand("isomorphism-check", "Star-graph isomorphism moments");
  isomorphism->add_option("--d", iso_d)->capture_default_str();
  isomorphism->add_option("--n", iso_n)->capture_default_str();
  isomorphism->add_option("--u", iso_levels, "Comma-separated levels")->default_val("0.5,1");

  auto* levelset = app.add_subcommand("levelset-check", "Level-set containment in the vacant set");
  levelset->add_option("--d", ls_d)->capture_default_str();
  levelset->add_option("--n", ls_n)->capture_default_str();
  levelset->add_option("--u", ls_levels, "Comma-separated levels")->default_val("0.1,1");
  levelset->add_option("--eps", eps)->capture_default_str();

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  set_thread_count(g.threads);
  const auto start = std::chrono::steady_clock::now();

  try {
    ExperimentConfig config;
    config.seed = g.seed;
    if (g.replicas) config.replicas = g.replicas;

    if (green->parsed()) {
      Output out(g.out);
      write_green_csv(load(net_arg), out.stream());
      return 0;
    }
    if (sample_gff->parsed()) {
      Output out(g.out);
      write_gff_samples(load(net_arg), replicas_or(g, 1000), g.seed, out.stream());
      return 0;
    }
    if (sample_loops->parsed()) {
      Output out(g.out);
      write_loop_samples(load(net_arg), alpha, replicas_or(g, 1000), g.seed, eps, out.stream());
      return 0;
    }
    if (couple->parsed()) {
      {
        Output out(g.out);
        write_coupled_samples(load(net_arg), replicas_or(g, 1000), g.seed, eps, out.stream());
      }
      config.experiment = "coupling-law";
      config.network = network_spec(net_arg);
      config.parameters["eps"] = eps;
      const Report report = run_experiment(config);
      return finish(report, report_path, elapsed(start));
    }
    if (run->parsed()) {
      const Report report = run_config_file(config_path);
      return finish(report, g.out, elapsed(start));
    }

    if (connectivity->parsed()) {
      config.experiment = "connectivity";
      config.network = network_spec(net_arg);
      config.parameters["x"] = x;
      config.parameters["y"] = y;
    } else if (det_ratio->parsed()) {
      config.experiment = "det-ratio";
      config.network = network_spec(net_arg);
      ojson edges = ojson::array();
      for (const auto& e : split(edges_arg, ',')) edges.push_back(std::stoul(e));
      config.parameters["edges"] = edges;
      config.parameters["eps"] = eps;
    } else if (bridge->parsed()) {
      config.experiment = "bridge-check";
      config.parameters["lambdas"] = parse_numbers(lambda_grid);
      config.parameters["T"] = length;
      config.parameters["ratio"] = ratio;
    } else if (interlacement->parsed()) {
      config.experiment = "interlacement";
      config.parameters["d"] = il_d;
      config.parameters["n"] = il_n;
      config.parameters["r"] = radius;
      config.parameters["u"] = u;
      config.parameters["sets"] = parse_sets(sets_arg);
      config.parameters["star_replicas"] = star_replicas;
    } else if (isomorphism->parsed()) {
      config.experiment = "isomorphism-check";
      config.parameters["d"] = iso_d;
      config.parameters["n"] = iso_n;
      config.parameters["u"] = parse_numbers(iso_levels);
    } else if (levelset->parsed()) {
      config.experiment = "levelset-check";
      config.parameters["d"] = ls_d;
      config.parameters["n"] = ls_n;
      config.parameters["u"] = parse_numbers(ls_levels);
      config.parameters["eps"] = eps;
    }
    const Report report = run_experiment(config);
    return finish(report, g.out, elapsed(start));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
