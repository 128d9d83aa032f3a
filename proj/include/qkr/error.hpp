#pragma once

#include <stdexcept>
#include <string>

namespace qkr {

// Process exit codes used by the CLI. Each exception type maps to one.
enum class ExitCode : int {
  kSuccess = 0,
  kConfig = 2,
  kInvariant = 3,
  kConvergence = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Bad user input: invalid parameters, unknown keys, malformed files.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfig; }
};

// A numerical invariant (norm, Hermiticity, trace, positivity, boundary
// occupancy) was violated beyond its tolerance.
class InvariantError : public Error {
 public:
  InvariantError(const std::string& what, double defect)
      : Error(what + " (defect " + std::to_string(defect) + ")"),
        defect_(defect) {}
  double defect() const noexcept { return defect_; }
  ExitCode exit_code() const noexcept override { return ExitCode::kInvariant; }

 private:
  double defect_;
};

// Probability mass reached the outer edge of the periodic box.
class BoundaryError : public InvariantError {
 public:
  BoundaryError(const std::string& what, double occupancy, long kick)
      : InvariantError(what + " at kick " + std::to_string(kick), occupancy),
        kick_(kick) {}
  long kick() const noexcept { return kick_; }

 private:
  long kick_;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double worst)
      : Error(what + " (worst " + std::to_string(worst) + ")"), worst_(worst) {}
  double worst() const noexcept { return worst_; }
  ExitCode exit_code() const noexcept override {
    return ExitCode::kConvergence;
  }

 private:
  double worst_;
};

}  // namespace qkr
