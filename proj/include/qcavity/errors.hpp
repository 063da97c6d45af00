#pragma once
#include <stdexcept>
#include <string>

namespace qcavity {

// Bad user input: malformed config, out-of-domain arguments, unnormalized
// preparations. CLI exit code 2.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical guard tripped: trace drift, Fock-ceiling leakage, jump
// probability too large for the step, non-convergence. CLI exit code 3.
struct NumericalGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure on an output or input path. CLI exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

}  // namespace qcavity
