#pragma once
#include <stdexcept>
#include <string>

namespace gpf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error { using Error::Error; };
struct IntegrationError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct ConvergenceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ResourceError : Error { using Error::Error; };

}  // namespace gpf
