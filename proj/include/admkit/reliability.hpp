#pragma once

#include <cstdint>
#include <vector>

#include "admkit/hier.hpp"
#include "admkit/load_process.hpp"
#include "admkit/types.hpp"

namespace admkit {

// Damage: boards fail by accumulated damage under the fluctuating load.
// Overload: boards fail only if the load ever exceeds their short-term
// strength, ignoring damage accumulation.
enum class ReliabilityMode { Damage, Overload };

inline const char* to_string(ReliabilityMode m) {
  return m == ReliabilityMode::Damage ? "damage" : "overload";
}

struct ReliabilityConfig {
  LoadModelParams load;
  double k_s = kStandardRampRate;  // ramp rate defining short-term strength
  bool use_ode = false;            // integrate numerically instead of exact stepping
  double ode_step_hours = 1.0;
  int threads = 1;
};

// Failure times in hours for each posterior draw; +inf marks survival to the
// horizon and NaN a replicate whose evaluation failed.  Replicate (i, j)
// always uses substream(substream(stream, i), j), independent of phi, mode
// and thread count, so runs at different phi share their randomness.
struct TimeToFailureSamples {
  std::vector<std::vector<double>> times;
  long n_invalid = 0;
};

TimeToFailureSamples simulate_time_to_failure(const std::vector<HyperParams>& draws, double phi,
                                              long n_rep, double horizon_hours,
                                              std::uint64_t stream,
                                              const ReliabilityConfig& config);

struct FailureProbability {
  std::vector<double> per_draw;
  double pooled = 0;
};

// Fraction of valid replicates failing before the horizon, per draw and pooled.
FailureProbability failure_probability(const TimeToFailureSamples& samples,
                                       double horizon_hours);

// Probability that the load path ever exceeds the short-term strength, with
// the same replicate coupling as simulate_time_to_failure.
FailureProbability overload_failure_probability(const std::vector<HyperParams>& draws,
                                                double phi, long n_rep, double horizon_hours,
                                                std::uint64_t stream,
                                                const ReliabilityConfig& config);

// beta = -Phi^-1(p_f); +inf at p_f = 0, -inf at p_f = 1.  The long double
// overload preserves tail probabilities near 1 that a double cannot carry.
double reliability_index(double p_f);
double reliability_index(long double p_f);

struct ReliabilityPoint {
  double phi = 0;
  double p_f = 0;   // pooled over draws and replicates
  double beta = 0;  // from pooled p_f
  double beta_lo = 0;  // equal-tailed 95% interval over per-draw betas
  double beta_hi = 0;
  std::vector<double> per_draw_pf;
};

// Evaluates the reliability index across a grid of performance factors,
// reusing one set of replicates for the whole grid.
std::vector<ReliabilityPoint> phi_beta_curve(const std::vector<HyperParams>& draws,
                                             const std::vector<double>& phi_grid, long n_rep,
                                             double horizon_hours, ReliabilityMode mode,
                                             std::uint64_t stream,
                                             const ReliabilityConfig& config);

struct KdResult {
  double beta_target = 0;
  double phi_overload = 0;  // pooled-curve phi reaching the target without damage
  double phi_damage = 0;    // same with damage accumulation
  double k_d = 0;           // posterior mean of per-draw phi_damage / phi_overload;
                            // falls back to phi_damage / phi_overload (pooled) when
                            // no draw's own curves bracket the target
  double k_d_lo = 0;        // equal-tailed 95% interval over draws, widened to
  double k_d_hi = 0;        // contain the point estimate; degenerate under fallback
  long n_draws_used = 0;    // draws whose curves bracket the target (0 => fallback)
  long n_points_excluded = 0;  // pooled-curve points dropped for infinite beta
};

// phi value at which a curve's beta equals `target`, by piecewise-linear
// interpolation after pooling adjacent monotonicity violations.  Points with
// non-finite beta are dropped.  Throws DomainError when the target is not
// bracketed.
double interpolate_phi_at_beta(const std::vector<std::pair<double, double>>& phi_beta,
                               double target);

// Duration-of-load adjustment at a target reliability index, from matched
// damage and overload curves over the same phi grid and replicates.
KdResult k_d_factor(const std::vector<ReliabilityPoint>& damage_curve,
                    const std::vector<ReliabilityPoint>& overload_curve, double beta_target);

}  // namespace admkit
