#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace domino {

/// Argument outside the mathematical domain of an operation (e.g. a
/// non-positive distance handed to the path-loss law).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A transmitter coincides with a receiver, so the path gain is undefined.
class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The SINR targets cannot be met simultaneously (spectral radius >= 1).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double spectral_radius)
      : std::runtime_error(what), spectral_radius_(spectral_radius) {}
  double spectral_radius() const noexcept { return spectral_radius_; }

 private:
  double spectral_radius_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::size_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config parse failure; `key_path()` is a JSON-pointer-like path such as
/// "/lambda" or "/window/0".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& message)
      : std::runtime_error(key_path + ": " + message), key_path_(key_path) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace domino
