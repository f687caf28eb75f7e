#ifndef NELSIM_ERRORS_HPP
#define NELSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nelsim {

/// Invalid or inconsistent run configuration. Maps to exit code 2 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical blow-up during time evolution. Maps to exit code 3 in the CLI.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nelsim

#endif
