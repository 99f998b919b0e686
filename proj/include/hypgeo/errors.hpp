#pragma once
#include <stdexcept>
#include <string>

namespace hypgeo {

// Bad inputs / malformed configuration. CLI exit code 2.
struct validation_error : std::invalid_argument {
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A representation failed its construction contract (relator residual,
// non-hyperbolic pants curve, ...). CLI exit code 1.
struct rep_error : std::runtime_error {
  double residual = 0.0;
  explicit rep_error(const std::string& msg, double res = 0.0)
      : std::runtime_error(msg), residual(res) {}
};

// An enumeration failed to stabilize within its budget. Carries the last two
// counts seen so callers can judge how far off stabilization was. Exit code 3.
struct budget_error : std::runtime_error {
  long last_count = -1;
  long prev_count = -1;
  budget_error(const std::string& msg, long prev, long last)
      : std::runtime_error(msg), last_count(last), prev_count(prev) {}
};

// A numerical solve failed (non-convergence, out-of-family input,
// escaping minimum). Exit code 4.
struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hypgeo
