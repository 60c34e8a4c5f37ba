#pragma once

#include <cstdint>
#include <vector>

#include "admkit/hier.hpp"
#include "admkit/types.hpp"

namespace admkit {

struct BoardOutcome {
  double time = kInf;  // hours, uncensored
  FailurePhase phase = FailurePhase::Survived;
};

// Simulates every board of a test: draws coefficients from the population
// model and evaluates the closed-form failure time, falling back to numerical
// integration of the ramp phase when the closed form degenerates.  Board i
// always uses substream(stream, i), so results do not depend on thread count.
std::vector<BoardOutcome> simulate_boards(const HyperParams& theta, const TestConfig& config,
                                          std::uint64_t stream, int threads = 1);

// As above, reduced to the censored form: times below config.censor_hours in
// board order plus the censored count.
CensoredSample simulate_failure_times(const HyperParams& theta, const TestConfig& config,
                                      std::uint64_t stream, int threads = 1);

// Monte Carlo estimate of the censored log likelihood of `data` under theta:
// n_sim boards are simulated, the failure probability before the censoring
// time is taken from the simulated fraction, and the density at each observed
// failure time comes from a Gaussian kernel density (Silverman bandwidth) fit
// to the logs of the sub-censoring simulated times.  With `truncated` set the
// density is conditioned on failing before the censoring time, dropping the
// failure-fraction factor for the uncensored terms.
double kde_log_likelihood(const CensoredSample& data, const HyperParams& theta, long n_sim,
                          std::uint64_t stream, int threads = 1, bool truncated = false);

}  // namespace admkit
