#pragma once
// shared helpers for the test binaries
#include <cmath>
#include <vector>

namespace gpf::test {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace gpf::test
