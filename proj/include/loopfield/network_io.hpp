#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopfield/network.hpp"

namespace loopfield {

/// {"vertices": N, "edges": [[u, v, C], ...], "killing": [...]}; killing
/// entries may be the string "inf" for absorbing vertices.
Network network_from_json(const nlohmann::json& doc);
nlohmann::ordered_json network_to_json(const Network& net);

Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

/// Either an inline network document, {"file": path}, or a builder:
///   {"box": {"d": 2, "n": 5, "C": 1, "kappa": 0, "mode": "absorbing"}}
///   {"grid": {"shape": [4, 4], "C": 1, "kappa": 0.1}}
///   {"path": {"count": 3, "C": 1, "kappa": 1}}
Network network_from_spec(const nlohmann::json& spec);

/// Comma-separated rows under a header; doubles written with 17
/// significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(const std::string& value);
  CsvWriter& cells(const std::vector<double>& values);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Column names prefix0, prefix1, ...
std::vector<std::string> numbered_columns(const std::string& prefix, std::size_t count);

}  // namespace loopfield
