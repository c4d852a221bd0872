#include "loopfield/network_io.hpp"

#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "loopfield/report.hpp"

namespace loopfield {

namespace {

double parse_killing(const nlohmann::json& value, std::size_t index) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  throw NetworkError("killing[" + std::to_string(index) + "]: expected a number or \"inf\"");
}

template <class T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw NetworkError(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw NetworkError(where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const nlohmann::json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? field<T>(obj, key, where) : fallback;
}

}  // namespace

Network network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw NetworkError("network: expected an object");
  const auto n = field<std::size_t>(doc, "vertices", "network");
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw NetworkError("network: 'edges' must be an array");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned() || !e[2].is_number()) {
      throw NetworkError("edges[" + std::to_string(i) + "]: expected [u, v, C]");
    }
    edges.push_back({e[0].get<VertexId>(), e[1].get<VertexId>(), e[2].get<double>()});
  }
  if (!doc.contains("killing") || !doc["killing"].is_array()) {
    throw NetworkError("network: 'killing' must be an array");
  }
  std::vector<double> killing;
  for (std::size_t i = 0; i < doc["killing"].size(); ++i) {
    killing.push_back(parse_killing(doc["killing"][i], i));
  }
  return Network::create(n, std::move(edges), std::move(killing));
}

nlohmann::ordered_json network_to_json(const Network& net) {
  nlohmann::ordered_json doc;
  doc["vertices"] = net.vertex_count();
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : net.edges()) edges.push_back({e.u, e.v, e.conductance});
  auto& killing = doc["killing"] = nlohmann::ordered_json::array();
  for (double k : net.killing()) killing.push_back(k);
  return doc;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError("cannot open network file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw NetworkError(path + ": " + e.what());
  }
  return network_from_json(doc);
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw NetworkError("cannot write network file " + path);
  out << network_to_json(net).dump(2) << '\n';
}

Network network_from_spec(const nlohmann::json& spec) {
  if (spec.is_string()) return load_network(spec.get<std::string>());
  if (!spec.is_object()) throw NetworkError("network: expected an object or a file name");
  if (spec.contains("file")) return load_network(field<std::string>(spec, "file", "network"));
  if (spec.contains("box")) {
    const auto& b = spec["box"];
    return build_box_network(field<int>(b, "d", "network.box"), field<int>(b, "n", "network.box"),
                             field_or<double>(b, "C", 1.0, "network.box"),
                             field_or<double>(b, "kappa", 0.0, "network.box"),
                             parse_boundary_mode(field_or<std::string>(
                                 b, "mode", "absorbing", "network.box")));
  }
  if (spec.contains("grid")) {
    const auto& g = spec["grid"];
    const auto shape = field<std::vector<int>>(g, "shape", "network.grid");
    return build_grid_network(shape, field_or<double>(g, "C", 1.0, "network.grid"),
                              field<double>(g, "kappa", "network.grid"));
  }
  if (spec.contains("path")) {
    const auto& p = spec["path"];
    return build_path_network(field<std::size_t>(p, "count", "network.path"),
                              field_or<double>(p, "C", 1.0, "network.path"),
                              field<double>(p, "kappa", "network.path"));
  }
  return network_from_json(spec);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ > 0) out_ << ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  out_ << format_double(value);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  separator();
  out_ << value;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& value) {
  separator();
  if (value.find_first_of(",\"\n") == std::string::npos) {
    out_ << value;
  } else {
    out_ << '"';
    for (char c : value) out_ << (c == '"' ? "\"\"" : std::string(1, c));
    out_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::cells(const std::vector<double>& values) {
  for (double v : values) cell(v);
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    throw std::logic_error("csv row has " + std::to_string(filled_) + " cells, header has " +
                           std::to_string(columns_));
  }
  out_ << '\n';
  filled_ = 0;
}

std::vector<std::string> numbered_columns(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace loopfield
