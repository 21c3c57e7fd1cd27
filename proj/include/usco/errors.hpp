#ifndef USCO_ERRORS_HPP
#define USCO_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace usco {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One violated invariant of a parameter struct.
struct InvalidParameter {
  std::string field;
  std::string reason;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<InvalidParameter> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<InvalidParameter>& violations() const { return violations_; }

  static std::string join(const std::vector<InvalidParameter>& v) {
    std::string msg = "invalid parameters:";
    for (const auto& e : v) msg += " [" + e.field + ": " + e.reason + "]";
    return msg;
  }

 private:
  std::vector<InvalidParameter> violations_;
};

// Mechanical susceptibility pole on the real axis (gamma = 0, omega = Omega_x).
class SingularSusceptibility : public Error {
 public:
  using Error::Error;
};

// The coupled response matrix is numerically singular at this probe frequency.
class SingularAtFrequency : public Error {
 public:
  SingularAtFrequency(const std::string& what, double omega)
      : Error(what), omega_(omega) {}
  double omega() const { return omega_; }

 private:
  double omega_ = 0.0;
};

class RootFindingFailed : public Error {
 public:
  using Error::Error;
};

// Closed-form stability condition is only derived for positive detuning.
class UnsupportedDetuning : public Error {
 public:
  using Error::Error;
};

class StiffnessGuard : public Error {
 public:
  using Error::Error;
};

class DivergenceGuard : public Error {
 public:
  using Error::Error;
};

// Not enough data for the requested Welch segmentation.
class TooShort : public Error {
 public:
  using Error::Error;
};

class PeaksNotFound : public Error {
 public:
  PeaksNotFound(const std::string& what, std::size_t found, std::size_t expected)
      : Error(what), found_(found), expected_(expected) {}
  std::size_t found() const { return found_; }
  std::size_t expected() const { return expected_; }

 private:
  std::size_t found_ = 0;
  std::size_t expected_ = 0;
};

// CLI configuration problem; carries the offending field path.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& path, const std::string& reason)
      : Error("config field '" + path + "': " + reason), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace usco

#endif
