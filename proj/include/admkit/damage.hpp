#pragma once

#include "admkit/types.hpp"

namespace admkit {

// Instantaneous damage accumulation rate at damage level alpha under applied
// stress tau, for a board of short-term strength tau_s.  Power terms are
// evaluated in log space and clamped so the result is always finite and
// nonnegative; the rate is 0 whenever tau / tau_s <= sigma0.
double damage_rate(double alpha, double tau, double tau_s, const RandomEffects& fx);

enum class RampStatus {
  Root,             // sign change bracketed and refined
  NoFailureBelowMax,  // no failure up to 1e12 hours
  FailureBelowMin     // damage already complete at 1e-12 hours
};

struct RampSolve {
  RampStatus status = RampStatus::Root;
  double time = 0;  // hours; meaningful only when status == Root
};

// Locates the ramp-load failure time, the root of the closed-form damage
// condition under a pure ramp at k psi/hour.  Never throws for valid inputs;
// out-of-bracket cases are reported through status.
RampSolve solve_ramp_failure(const RandomEffects& fx, double k);

// As above but returns the time directly and throws SolverError when no root
// lies within [1e-12, 1e12] hours.
double ramp_failure_time(const RandomEffects& fx, double k);

// Failure time under the ramp-then-hold protocol: ramp at k psi/hour to tau_c
// psi, then hold.  Fully closed-form.  tau_c = +inf degenerates to the pure
// ramp.  Throws NumericalError when intermediates cannot be represented.
DamageSolution constant_load_failure_time(const RandomEffects& fx, double k, double tau_c);

// Damage increment over one constant-stress segment, parameterised by the
// logs of the affine rate coefficients: d(alpha)/dt = A + B * alpha.
// Returns the time to reach alpha = 1 from alpha0 (+inf if never).
double constant_segment_failure_delta(double alpha0, double log_a, double log_b);
// Damage after dt hours in the same segment, assuming no failure within dt.
double advance_constant_segment(double alpha0, double log_a, double log_b, double dt);

// log coefficients of the affine damage rate at a fixed stress tau.
// Both are -inf when tau / tau_s <= sigma0.
struct SegmentCoeffs {
  double log_a = -kInf;
  double log_b = -kInf;
};
SegmentCoeffs segment_coeffs(double tau, double tau_s, const RandomEffects& fx);

// Exact first-passage propagation of the damage ODE across a piecewise
// constant profile, segment by segment.
DamageSolution propagate_piecewise(const RandomEffects& fx, double tau_s,
                                   const PiecewiseProfile& profile, double t_max);

// Numerical integration of the damage ODE with a fixed-step five-step
// Adams-Bashforth scheme bootstrapped by four RK4 steps.  The step history
// restarts at every profile breakpoint and the step size within a segment is
// the largest uniform value not exceeding `step` that lands exactly on the
// segment end.  Failure is located by linear interpolation between the
// bracketing steps.  alpha0 and t0 allow resuming mid-profile.
DamageSolution integrate_damage(const RandomEffects& fx, double tau_s,
                                const LoadProfile& profile, double t_max, double step,
                                double alpha0 = 0.0, double t0 = 0.0);

}  // namespace admkit
