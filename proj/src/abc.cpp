#include "admkit/abc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "admkit/simulate.hpp"

namespace admkit {

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("empirical_quantile: empty sample");
  if (!(p >= 0) || !(p <= 1)) throw DomainError("empirical_quantile: p must lie in [0, 1]");
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double w = pos - static_cast<double>(lo);
  if (w == 0) return sorted[lo];  // keeps infinities from propagating as NaN
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

SummaryVec summary_stats(std::span<const double> times) {
  if (times.empty()) throw DomainError("summary_stats: no uncensored times");
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  SummaryVec s;
  for (int j = 0; j < kNumQuantiles; ++j) {
    s[j] = empirical_quantile(sorted, 0.05 * (j + 1));
  }
  return s;
}

double kernel_log(const SummaryVec& s, const SummaryVec& s_obs, double delta) {
  if (!(delta > 0) || !std::isfinite(delta)) {
    throw DomainError("kernel_log: delta must be positive and finite");
  }
  double ss = (s - s_obs).squaredNorm();
  return -0.5 * kNumQuantiles * std::log(2.0 * M_PI * delta * delta) -
         ss / (2.0 * delta * delta);
}

void ChainConfig::validate() const {
  if (datasets.empty()) throw DomainError("ChainConfig: at least one dataset is required");
  for (const CensoredSample& d : datasets) {
    d.config.validate();
    if (d.times.empty()) {
      throw DomainError("ChainConfig: each dataset needs at least one uncensored failure");
    }
    if (d.config.n_boards != d.n_total()) {
      throw DomainError("ChainConfig: dataset board count does not match its test config");
    }
  }
  if (!(delta > 0) || !std::isfinite(delta)) throw DomainError("ChainConfig: delta must be positive");
  if (burn_in < 0 || thin < 1 || n_draws < 1) {
    throw DomainError("ChainConfig: need burn_in >= 0, thin >= 1, n_draws >= 1");
  }
  if (!start.finite() || !start.scales_positive()) {
    throw DomainError("ChainConfig: start point must be finite with positive scales");
  }
  if (!proposal.valid()) throw DomainError("ChainConfig: invalid proposal diagonal");
  if (standardize && pilot_replicates < 2) {
    throw DomainError("ChainConfig: standardization needs at least 2 pilot replicates");
  }
}

namespace {

// Median absolute deviation about the median, coordinate-wise over rows.
SummaryVec mad_columns(const std::vector<SummaryVec>& rows) {
  SummaryVec out;
  std::vector<double> col(rows.size());
  for (int j = 0; j < kNumQuantiles; ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) col[r] = rows[r][j];
    std::sort(col.begin(), col.end());
    double med = empirical_quantile(col, 0.5);
    for (double& v : col) v = std::fabs(v - med);
    std::sort(col.begin(), col.end());
    out[j] = empirical_quantile(col, 0.5);
  }
  return out;
}

}  // namespace

ChainContext prepare_observations(const ChainConfig& config) {
  config.validate();
  ChainContext ctx;
  std::size_t n_data = config.datasets.size();
  ctx.transforms.resize(n_data);
  ctx.s_obs.resize(n_data);

  if (config.standardize) {
    std::uint64_t pilot_key = substream(config.seed, "pilot-scale");
    for (std::size_t d = 0; d < n_data; ++d) {
      TestConfig tc = config.datasets[d].config;
      std::vector<SummaryVec> rows;
      rows.reserve(config.pilot_replicates);
      for (int r = 0; r < config.pilot_replicates; ++r) {
        CensoredSample sim = simulate_failure_times(
            config.start, tc, substream(substream(pilot_key, d), static_cast<std::uint64_t>(r)),
            config.threads);
        if (sim.times.empty()) continue;
        SummaryVec raw = summary_stats(sim.times);
        rows.push_back(raw.array().log().matrix());
      }
      if (rows.size() < 2) {
        throw NumericalError(
            "prepare_observations: start point produces almost no uncensored failures for dataset " +
            std::to_string(d));
      }
      SummaryVec scale = mad_columns(rows);
      for (int j = 0; j < kNumQuantiles; ++j) {
        if (!(scale[j] > 0)) scale[j] = 1.0;
      }
      ctx.transforms[d] = {true, scale};
    }
  }
  for (std::size_t d = 0; d < n_data; ++d) {
    ctx.s_obs[d] = ctx.transforms[d](summary_stats(config.datasets[d].times));
  }
  return ctx;
}

double abc_accept_ratio(const ChainState& current, const ChainState& proposal,
                        double theta_prior_ratio, const ChainConfig& config,
                        const ChainContext& ctx) {
  std::size_t n_data = config.datasets.size();
  if (current.summaries.size() != n_data || proposal.summaries.size() != n_data ||
      current.p_hat.size() != n_data || proposal.p_hat.size() != n_data) {
    throw DomainError("abc_accept_ratio: states must carry one summary and p_hat per dataset");
  }
  if (!(theta_prior_ratio >= 0)) {
    throw DomainError("abc_accept_ratio: prior ratio must be nonnegative");
  }
  if (theta_prior_ratio == 0) return 0.0;

  double log_r = std::log(theta_prior_ratio);
  for (std::size_t d = 0; d < n_data; ++d) {
    long n = config.datasets[d].n_total();
    long n_cens = config.datasets[d].n_censored;
    long n_fail = n - n_cens;
    double fp = proposal.p_hat[d];
    double fc = current.p_hat[d];
    if ((fp <= 0 && n_fail > 0) || (fp >= 1 && n_cens > 0)) return 0.0;
    log_r += kernel_log(proposal.summaries[d], ctx.s_obs[d], config.delta) -
             kernel_log(current.summaries[d], ctx.s_obs[d], config.delta);
    if (n_fail > 0) log_r += static_cast<double>(n_fail) * (std::log(fp) - std::log(fc));
    if (n_cens > 0) log_r += static_cast<double>(n_cens) * (std::log1p(-fp) - std::log1p(-fc));
  }
  if (std::isnan(log_r)) return 0.0;
  if (log_r >= 0) return 1.0;
  return std::exp(log_r);
}

namespace {

struct SimulatedState {
  ChainState state;
  bool ok = false;
};

SimulatedState make_state(const HyperParams& theta, const ChainConfig& config,
                          const ChainContext& ctx, std::uint64_t key) {
  SimulatedState out;
  out.state.theta = theta;
  std::size_t n_data = config.datasets.size();
  out.state.summaries.resize(n_data);
  out.state.p_hat.resize(n_data);
  for (std::size_t d = 0; d < n_data; ++d) {
    TestConfig tc = config.datasets[d].config;
    CensoredSample sim;
    try {
      sim = simulate_failure_times(theta, tc, substream(key, d), config.threads);
    } catch (const std::runtime_error&) {
      return out;
    }
    if (sim.times.empty()) return out;
    out.state.summaries[d] = ctx.transforms[d](summary_stats(sim.times));
    out.state.p_hat[d] =
        static_cast<double>(sim.times.size()) / static_cast<double>(tc.n_boards);
  }
  out.ok = true;
  return out;
}

double kernel_sum(const ChainState& state, const ChainConfig& config, const ChainContext& ctx) {
  double s = 0.0;
  for (std::size_t d = 0; d < state.summaries.size(); ++d) {
    s += kernel_log(state.summaries[d], ctx.s_obs[d], config.delta);
  }
  return s;
}

}  // namespace

ChainResult run_chain(const ChainConfig& config) {
  config.validate();
  ChainResult result;
  result.ctx = prepare_observations(config);
  const ChainContext& ctx = result.ctx;

  std::uint64_t chain_key = substream(config.seed, "chain");
  double lp = log_prior(config.start, config.prior);
  if (!std::isfinite(lp)) {
    throw DomainError("run_chain: start point has zero prior density");
  }
  SimulatedState init = make_state(config.start, config, ctx, substream(chain_key, "init"));
  if (!init.ok) {
    throw NumericalError("run_chain: start point yields no uncensored failures");
  }
  ChainState state = std::move(init.state);

  long total = config.burn_in + config.thin * config.n_draws;
  long accepted = 0;
  result.draws.reserve(config.n_draws);
  for (long iter = 1; iter <= total; ++iter) {
    std::uint64_t it_key = substream(chain_key, static_cast<std::uint64_t>(iter));
    Rng move_rng(substream(it_key, "move"));
    HyperParams cand = propose(state.theta, config.proposal, move_rng);
    double lp_cand = log_prior(cand, config.prior);
    bool accept = false;
    if (std::isfinite(lp_cand)) {
      SimulatedState cand_state = make_state(cand, config, ctx, substream(it_key, "sim"));
      if (!cand_state.ok) {
        ++result.n_rejected_degenerate;
      } else {
        double prior_ratio = std::exp(std::min(lp_cand - lp, 700.0));
        double ratio = abc_accept_ratio(state, cand_state.state, prior_ratio, config, ctx);
        if (move_rng.uniform() < ratio) {
          state = std::move(cand_state.state);
          lp = lp_cand;
          accept = true;
        }
      }
    }
    if (accept) ++accepted;
    if (iter > config.burn_in && (iter - config.burn_in) % config.thin == 0) {
      result.draws.push_back({iter, state, kernel_sum(state, config, ctx),
                              static_cast<double>(accepted) / static_cast<double>(iter)});
    }
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  result.n_iterations = total;
  return result;
}

CalibrationResult calibrate_bandwidth(const std::vector<double>& candidates,
                                      long pilot_iterations, const ChainConfig& base) {
  if (candidates.empty()) throw DomainError("calibrate_bandwidth: no candidates");
  if (pilot_iterations < 1) throw DomainError("calibrate_bandwidth: pilot_iterations must be >= 1");
  std::vector<double> sorted = candidates;
  std::sort(sorted.begin(), sorted.end());
  if (!(sorted.front() > 0)) throw DomainError("calibrate_bandwidth: candidates must be positive");

  CalibrationResult out;
  out.acceptance_rates.reserve(sorted.size());
  ChainConfig pilot = base;
  pilot.burn_in = 0;
  pilot.thin = 1;
  pilot.n_draws = pilot_iterations;
  pilot.seed = substream(base.seed, "calibrate");
  bool found = false;
  for (double delta : sorted) {
    pilot.delta = delta;
    ChainResult r = run_chain(pilot);
    out.acceptance_rates.push_back(r.acceptance_rate);
    if (!found && r.acceptance_rate >= 0.01) {
      out.delta = delta;
      found = true;
    }
  }
  if (!found) {
    out.delta = sorted.back();
    out.warning = true;
  }
  return out;
}

}  // namespace admkit
