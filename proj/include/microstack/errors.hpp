#pragma once

#include <stdexcept>
#include <string>

namespace microstack {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

// electrochem
struct NonPositiveConcentration : Error {
  using Error::Error;
};
struct Unreachable : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  NoConvergence(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
  double last_residual = 0.0;
};

// hydraulics
struct SingularNetwork : Error {
  using Error::Error;
};
struct CycleDetected : Error {
  using Error::Error;
};

// transport
struct EigenvalueBracketFailure : Error {
  using Error::Error;
};

// electrical
struct StructurallySingular : Error {
  using Error::Error;
};
struct SingularJacobian : Error {
  using Error::Error;
};

// genbench
struct InvalidRatio : Error {
  using Error::Error;
};

}  // namespace microstack
