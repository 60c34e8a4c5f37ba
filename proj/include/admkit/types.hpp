#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace admkit {

inline constexpr double kMuHours = 1.0;                // damage-rate time constant, hours
inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kStandardRampRate = 388440.0;  // psi/hour
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Inputs outside an operation's documented domain.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
// A bracketing root solve could not locate a sign change.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A closed-form evaluation degenerated (non-finite intermediates).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Time stepping produced a non-finite state or was misconfigured.
struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad or missing run configuration, including file I/O problems.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piece-specific damage-model coefficients.  a, b, c, n are positive and
// sigma0, the stress-ratio threshold, lies in (0, 1).
struct RandomEffects {
  double a = 0;
  double b = 0;
  double c = 0;
  double n = 0;
  double sigma0 = 0;

  bool valid() const {
    return std::isfinite(a) && a > 0 && std::isfinite(b) && b > 0 &&
           std::isfinite(c) && c > 0 && std::isfinite(n) && n > 0 &&
           std::isfinite(sigma0) && sigma0 > 0 && sigma0 < 1;
  }
};

// Linear ramp at k psi/hour capped at tau_c psi (tau_c = +inf for a pure ramp).
struct RampConstantProfile {
  double k = kStandardRampRate;
  double tau_c = kInf;

  double ramp_end() const { return std::isinf(tau_c) ? kInf : tau_c / k; }
};

// Piecewise-constant load: levels[i] applies on [breakpoints[i], breakpoints[i+1]),
// with the final level extending indefinitely.  breakpoints[0] must be 0.
struct PiecewiseProfile {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  bool valid() const {
    if (breakpoints.empty() || breakpoints.size() != levels.size()) return false;
    if (breakpoints.front() != 0.0) return false;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      if (!(breakpoints[i] < breakpoints[i + 1])) return false;
    }
    for (double v : levels) {
      if (!std::isfinite(v) || v < 0) return false;
    }
    return true;
  }
};

using LoadProfile = std::variant<RampConstantProfile, PiecewiseProfile>;

// Ramp-load test protocol: load rises at k psi/hour, holds at tau_c psi, and
// observation stops at censor_hours.
struct TestConfig {
  double k = kStandardRampRate;
  double tau_c = kInf;
  double censor_hours = kInf;
  long n_boards = 0;

  double ramp_end() const { return std::isinf(tau_c) ? kInf : tau_c / k; }

  void validate() const {
    if (!(k > 0) || !std::isfinite(k)) throw DomainError("TestConfig: k must be positive and finite");
    if (!(tau_c > 0)) throw DomainError("TestConfig: tau_c must be positive");
    if (!(censor_hours > 0)) throw DomainError("TestConfig: censor_hours must be positive");
    if (n_boards < 0) throw DomainError("TestConfig: n_boards must be nonnegative");
    if (std::isfinite(tau_c) && !(censor_hours > ramp_end())) {
      throw DomainError("TestConfig: censor_hours must exceed the ramp duration tau_c / k");
    }
  }
};

enum class FailurePhase { Ramp, Constant, Survived };

inline const char* to_string(FailurePhase p) {
  switch (p) {
    case FailurePhase::Ramp: return "ramp";
    case FailurePhase::Constant: return "constant";
    default: return "survived";
  }
}

// Outcome of one board: failure_time is +inf when the board survives, and
// alpha_at_t0 is the damage when the ramp ends (1 if it failed during the ramp,
// 0 for profiles with no ramp).
struct DamageSolution {
  double failure_time = kInf;
  FailurePhase phase = FailurePhase::Survived;
  double alpha_at_t0 = 0.0;
  double alpha_final = 0.0;

  bool failed() const { return phase != FailurePhase::Survived; }
};

// Censored dataset: uncensored failure times plus the count of boards still
// intact at config.censor_hours.
struct CensoredSample {
  std::vector<double> times;
  long n_censored = 0;
  TestConfig config;

  long n_total() const { return static_cast<long>(times.size()) + n_censored; }
};

}  // namespace admkit
