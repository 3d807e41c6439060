// errors.hpp — exception taxonomy and process exit codes for the toolkit.
#pragma once

#include <stdexcept>
#include <string>

namespace torspec {

// Exit codes used by the CLI. Library code throws; the CLI maps to these.
enum class ExitCode : int {
  ok = 0,
  failure = 1,           // unexpected / internal
  domain = 2,            // invalid input domain (parameters, ranges, file formats)
  convergence = 3,       // iterative procedure failed to reach tolerance
  precondition = 4,      // mathematical precondition violated (sign/ambiguity/band interior)
};

// Base class so the CLI can catch everything from this library at once.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual ExitCode exit_code() const { return ExitCode::failure; }
};

// Parameter or argument outside its mathematical or documented domain.
struct DomainError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::domain; }
};

// An iterative solve (root find, fixed point, Richardson sequence) did not converge.
struct ConvergenceFailure : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::convergence; }
};

// A transform that requires a definite sign of the fiber symbol was requested
// where that sign condition fails.
struct SignConditionError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::precondition; }
};

// A query whose answer is not well defined in the requested configuration
// (e.g. interval classification straddling a threshold within tolerance).
struct AmbiguityError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::precondition; }
};

// Spectral parameter lies inside the essential band where a discrete-spectrum
// query makes no sense.
struct BandInteriorError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::precondition; }
};

// Two supposedly matching computations disagreed beyond tolerance.
struct MismatchError : Error {
  using Error::Error;
};

// Requested problem size exceeds what this build is sized for.
struct CapacityError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::domain; }
};

// A truncated expansion cannot reach the requested accuracy.
struct TruncationError : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::convergence; }
};

// Not enough data points for a requested fit / extrapolation.
struct InsufficientData : Error {
  using Error::Error;
  ExitCode exit_code() const override { return ExitCode::domain; }
};

}  // namespace torspec
