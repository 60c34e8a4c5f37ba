#include "admkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "admkit/damage.hpp"
#include "admkit/parallel.hpp"

namespace admkit {

namespace {

// Closed-form evaluation with a numerical rescue path: when the ramp-end
// damage cannot be represented in closed form, integrate the ramp phase and
// finish the hold phase with the exact single-segment solution.
DamageSolution solve_board(const RandomEffects& fx, const TestConfig& config) {
  try {
    return constant_load_failure_time(fx, config.k, config.tau_c);
  } catch (const NumericalError&) {
    double t0 = config.ramp_end();
    if (!std::isfinite(t0)) throw;
    double tau_s = solve_ramp_failure(fx, config.k).time * config.k;
    RampConstantProfile profile{config.k, config.tau_c};
    DamageSolution ramp = integrate_damage(fx, tau_s, profile, t0, t0 / 4096.0);
    if (ramp.failed()) return ramp;
    SegmentCoeffs co = segment_coeffs(config.tau_c, tau_s, fx);
    double alpha0 = std::min(ramp.alpha_final, 1.0 - 1e-15);
    double delta = constant_segment_failure_delta(alpha0, co.log_a, co.log_b);
    if (std::isinf(delta)) return {kInf, FailurePhase::Survived, ramp.alpha_final, ramp.alpha_final};
    return {t0 + delta, FailurePhase::Constant, ramp.alpha_final, 1.0};
  }
}

}  // namespace

std::vector<BoardOutcome> simulate_boards(const HyperParams& theta, const TestConfig& config,
                                          std::uint64_t stream, int threads) {
  config.validate();
  if (!theta.finite() || !theta.scales_positive()) {
    throw DomainError("simulate_boards: hyperparameters must be finite with positive scales");
  }
  std::vector<BoardOutcome> out(static_cast<std::size_t>(config.n_boards));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    Rng rng(substream(stream, i));
    RandomEffects fx = sample_effects(theta, rng);
    if (!fx.valid()) {
      throw NumericalError("simulate_boards: degenerate coefficients for board " +
                           std::to_string(i));
    }
    DamageSolution sol;
    try {
      sol = solve_board(fx, config);
    } catch (const std::runtime_error& err) {
      throw NumericalError("simulate_boards: board " + std::to_string(i) + ": " + err.what());
    }
    out[i] = {sol.failure_time, sol.phase};
  });
  return out;
}

CensoredSample simulate_failure_times(const HyperParams& theta, const TestConfig& config,
                                      std::uint64_t stream, int threads) {
  std::vector<BoardOutcome> boards = simulate_boards(theta, config, stream, threads);
  CensoredSample sample;
  sample.config = config;
  for (const BoardOutcome& b : boards) {
    if (b.time < config.censor_hours) {
      sample.times.push_back(b.time);
    } else {
      ++sample.n_censored;
    }
  }
  return sample;
}

namespace {

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  double pos = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

}  // namespace

double kde_log_likelihood(const CensoredSample& data, const HyperParams& theta, long n_sim,
                          std::uint64_t stream, int threads, bool truncated) {
  if (n_sim < 2) throw DomainError("kde_log_likelihood: n_sim must be at least 2");
  data.config.validate();
  for (double t : data.times) {
    if (!(t > 0) || t > data.config.censor_hours) {
      throw DomainError("kde_log_likelihood: observed times must lie in (0, censor_hours]");
    }
  }
  if (data.times.empty() && data.n_censored == 0) return 0.0;

  TestConfig sim_config = data.config;
  sim_config.n_boards = n_sim;
  std::vector<BoardOutcome> boards = simulate_boards(theta, sim_config, stream, threads);

  std::vector<double> log_times;
  log_times.reserve(boards.size());
  for (const BoardOutcome& b : boards) {
    if (b.time < sim_config.censor_hours) log_times.push_back(std::log(b.time));
  }
  double f_hat = static_cast<double>(log_times.size()) / static_cast<double>(n_sim);

  double censored_part = 0.0;
  if (data.n_censored > 0) {
    if (f_hat >= 1.0) return -kInf;
    censored_part = static_cast<double>(data.n_censored) * std::log1p(-f_hat);
  }
  if (data.times.empty()) return censored_part;
  if (log_times.empty()) return -kInf;

  double h;
  {
    std::vector<double> sorted = log_times;
    std::sort(sorted.begin(), sorted.end());
    double sd = sample_sd(sorted);
    double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double spread = sd;
    if (iqr > 0) spread = std::min(spread, iqr / 1.34);
    h = 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
    if (!(h > 0)) h = 1e-8;
  }

  std::size_t m = log_times.size();
  double inv_h = 1.0 / h;
  double norm = 1.0 / (std::sqrt(2.0 * M_PI) * h * static_cast<double>(m));
  std::vector<double> log_density(data.times.size());
  parallel_for(data.times.size(), threads, [&](std::size_t i) {
    double lt = std::log(data.times[i]);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double z = (lt - log_times[j]) * inv_h;
      acc += std::exp(-0.5 * z * z);
    }
    // density of the failure time itself, so divide by t for the log scale
    log_density[i] = std::log(acc * norm) - lt;
  });

  double uncensored_part = 0.0;
  for (double ld : log_density) uncensored_part += ld;
  if (!truncated) {
    uncensored_part += static_cast<double>(data.times.size()) * std::log(f_hat);
  }
  return uncensored_part + censored_part;
}

}  // namespace admkit
