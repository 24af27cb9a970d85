#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlwave {

// CLI exit codes: 0 = all checks pass, 1 = solver failure, 2 = config failure.
inline constexpr int exit_pass = 0;
inline constexpr int exit_solver_failure = 1;
inline constexpr int exit_config_failure = 2;

// Invalid scenario/construction input. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver-level failure. Maps to exit code 1.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The nonlocal conditions are resonant for one mode: its per-channel 2x2
// determinant fell below the singularity guard.
struct SingularModeSystem : SolveError {
  SingularModeSystem(std::size_t mode, int channel, double determinant_modulus,
                     const std::string& what)
      : SolveError(what),
        mode(mode),
        channel(channel),
        determinant_modulus(determinant_modulus) {}
  std::size_t mode;
  int channel;
  double determinant_modulus;
};

// Picard increments stopped contracting (rho_k >= 1 sustained).
struct NonContraction : SolveError {
  NonContraction(double rho, int iterations, const std::string& what)
      : SolveError(what), rho(rho), iterations(iterations) {}
  double rho;
  int iterations;
};

// An iterate's solution norms crossed the configured ceiling.
struct BlowupSuspected : SolveError {
  BlowupSuspected(double norm, int iteration, const std::string& what)
      : SolveError(what), norm(norm), iteration(iteration) {}
  double norm;
  int iteration;
};

}  // namespace nlwave
