#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "admkit/hier.hpp"
#include "admkit/types.hpp"

namespace admkit {

inline constexpr int kNumQuantiles = 19;
using SummaryVec = Eigen::Matrix<double, kNumQuantiles, 1>;

// Empirical quantile with linear interpolation between order statistics at
// rank 1 + p (n - 1).  `sorted` must be ascending and nonempty.
double empirical_quantile(std::span<const double> sorted, double p);

// The 5%, 10%, ..., 95% quantiles of `times` (uncensored failure times).
// Throws DomainError when `times` is empty.
SummaryVec summary_stats(std::span<const double> times);

// Coordinate map applied to raw summary vectors before kernel comparison:
// optionally log, then divide each coordinate by a fixed scale.
struct SummaryTransform {
  bool log_scale = false;
  SummaryVec scale = SummaryVec::Ones();

  SummaryVec operator()(SummaryVec raw) const {
    if (log_scale) raw = raw.array().log().matrix();
    return (raw.array() / scale.array()).matrix();
  }
};

// log of the product of independent N(0, delta^2) kernel densities over the
// coordinates of s - s_obs.
double kernel_log(const SummaryVec& s, const SummaryVec& s_obs, double delta);

// Markov state: hyperparameters plus the summaries and failure fractions of
// the synthetic replicate generated at acceptance time, one per dataset.
struct ChainState {
  HyperParams theta;
  std::vector<SummaryVec> summaries;  // transformed coordinates
  std::vector<double> p_hat;          // simulated fraction failing before censoring
};

struct ChainConfig {
  std::vector<CensoredSample> datasets;
  double delta = 1.0;
  long burn_in = 0;
  long thin = 1;
  long n_draws = 1;
  HyperParams start;
  ProposalSpec proposal;
  PriorSpec prior;
  bool standardize = true;    // compare log-hour summaries scaled by pilot spread
  int pilot_replicates = 200;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

// Observation-side quantities fixed for a whole run: transformed observed
// summaries and the per-dataset coordinate transforms.  The standardizing
// scales are median absolute deviations across pilot replicates simulated at
// the chain start, so they depend only on (seed, start, datasets).
struct ChainContext {
  std::vector<SummaryVec> s_obs;
  std::vector<SummaryTransform> transforms;
};

ChainContext prepare_observations(const ChainConfig& config);

// Metropolis acceptance probability for moving from `current` to `proposal`:
// the kernel ratio on summaries times the prior ratio times the censoring
// factors F^(n - n_c) (1 - F)^(n_c) of each dataset.  Returns a value in
// [0, 1]; degenerate proposals (simulated failure fraction of 0 against
// observed failures, or 1 against observed survivors) give 0.
double abc_accept_ratio(const ChainState& current, const ChainState& proposal,
                        double theta_prior_ratio, const ChainConfig& config,
                        const ChainContext& ctx);

struct ChainDraw {
  long iteration = 0;
  ChainState state;
  double kernel_log_sum = 0;        // summed over datasets at the retained state
  double cumulative_accept_rate = 0;
};

struct ChainResult {
  std::vector<ChainDraw> draws;
  double acceptance_rate = 0;
  long n_iterations = 0;
  long n_rejected_degenerate = 0;  // proposals rejected for failed or empty simulations
  ChainContext ctx;
};

// Runs burn_in + thin * n_draws iterations and retains every thin-th state
// after burn-in.  Iteration i derives all randomness from substream(seed, i),
// so the realized chain is a pure function of (config contents, seed).
ChainResult run_chain(const ChainConfig& config);

struct CalibrationResult {
  double delta = 0;
  bool warning = false;                  // no candidate reached the target rate
  std::vector<double> acceptance_rates;  // one per candidate, same order
};

// Picks the smallest candidate bandwidth whose pilot chain accepts at least
// 1% of proposals; falls back to the largest candidate with a warning.
CalibrationResult calibrate_bandwidth(const std::vector<double>& candidates,
                                      long pilot_iterations, const ChainConfig& base);

}  // namespace admkit
