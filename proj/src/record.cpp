#include "gpf/record.hpp"

#include <algorithm>
#include <cmath>

#include "gpf/errors.hpp"

namespace gpf {

void ExperimentRecord::add(const std::string& key, double v) {
  auto it = series.find(key);
  if (it == series.end()) {
    order.push_back(key);
    it = series.emplace(key, std::vector<double>{}).first;
  }
  it->second.push_back(v);
}

const std::vector<double>& ExperimentRecord::at(const std::string& key) const {
  auto it = series.find(key);
  if (it == series.end()) throw DomainError("record has no series " + key);
  return it->second;
}

std::size_t ExperimentRecord::rows() const {
  std::size_t r = 0;
  for (const auto& [k, v] : series) r = std::max(r, v.size());
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gpf
