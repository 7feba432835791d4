#pragma once
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace gpf {

// Named scalar series plus run metadata.
struct ExperimentRecord {
  std::string name;
  std::vector<std::string> order;  // column order
  std::map<std::string, std::vector<double>> series;
  nlohmann::json meta = nlohmann::json::object();

  void add(const std::string& key, double v);
  const std::vector<double>& at(const std::string& key) const;
  std::size_t rows() const;
};

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gpf
