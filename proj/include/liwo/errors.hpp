#pragma once

#include <stdexcept>
#include <string>

namespace liwo {

// Base class for every error thrown by the library. The `code()` string is
// stable and machine-readable; the CLI maps it to exit diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string &what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string &code() const { return code_; }

 private:
  std::string code_;
};

struct ContractError : Error {
  explicit ContractError(const std::string &what) : Error("contract", what) {}
};

struct RangeError : Error {
  explicit RangeError(const std::string &what) : Error("range", what) {}
};

struct OrderingError : Error {
  explicit OrderingError(const std::string &what) : Error("ordering", what) {}
};

// A sensor stream has a hole larger than the integrator tolerates.
struct GapError : Error {
  explicit GapError(const std::string &what) : Error("gap", what) {}
};

struct SimulationError : Error {
  explicit SimulationError(const std::string &what) : Error("simulation", what) {}
};

// Stationarity check failed during static initialization.
struct InitializationRejected : Error {
  explicit InitializationRejected(const std::string &what)
      : Error("initialization-rejected", what) {}
};

struct DegenerateGeometryError : Error {
  explicit DegenerateGeometryError(const std::string &what)
      : Error("degenerate-geometry", what) {}
};

struct SolverStalledError : Error {
  explicit SolverStalledError(const std::string &what)
      : Error("solver-stalled", what) {}
};

struct EvaluationError : Error {
  explicit EvaluationError(const std::string &what) : Error("evaluation", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string &what) : Error("io", what) {}
};

}  // namespace liwo
