#include "admkit/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "admkit/abc.hpp"
#include "admkit/damage.hpp"
#include "admkit/parallel.hpp"
#include "admkit/special.hpp"

namespace admkit {

namespace {

void check_reliability_args(const std::vector<HyperParams>& draws, long n_rep,
                            double horizon_hours, const ReliabilityConfig& config) {
  if (draws.empty()) throw DomainError("reliability: at least one parameter draw is required");
  for (const HyperParams& th : draws) {
    if (!th.finite() || !th.scales_positive()) {
      throw DomainError("reliability: draws must be finite with positive scales");
    }
  }
  if (n_rep < 1) throw DomainError("reliability: n_rep must be at least 1");
  if (!(horizon_hours > 0) || !std::isfinite(horizon_hours)) {
    throw DomainError("reliability: horizon_hours must be positive and finite");
  }
  config.load.validate();
  if (!(config.k_s > 0) || !std::isfinite(config.k_s)) {
    throw DomainError("reliability: k_s must be positive and finite");
  }
  if (config.use_ode && !(config.ode_step_hours > 0)) {
    throw DomainError("reliability: ode_step_hours must be positive");
  }
}

// One dwelling/board pairing, shared by every phi and both failure modes.
struct Replicate {
  RandomEffects fx;
  double tau_s = 0;           // +inf when the strength solve finds no failure
  PiecewiseProfile combined;  // dimensionless combined load ratio per segment
  double max_ratio = 0;
  bool ok = false;
};

Replicate make_replicate(const HyperParams& theta, double horizon_hours,
                         const ReliabilityConfig& config, std::uint64_t key) {
  Replicate rep;
  Rng rng(key);
  // Draw order is fixed (effects, then dwelling path) so the realized pair
  // depends only on the replicate key.
  rep.fx = sample_effects(theta, rng);
  LoadPath path = sample_load_path(config.load, horizon_hours, rng);
  if (!rep.fx.valid()) return rep;
  RampSolve rs = solve_ramp_failure(rep.fx, config.k_s);
  switch (rs.status) {
    case RampStatus::Root:
      rep.tau_s = config.k_s * rs.time;
      break;
    case RampStatus::NoFailureBelowMax:
      rep.tau_s = kInf;
      break;
    case RampStatus::FailureBelowMin:
      rep.tau_s = config.k_s * 1e-12;
      break;
  }
  double gamma_d = config.load.dead_to_live_ratio * path.dead;
  std::size_t i = 0, j = 0;
  const StepProcess& s = path.sustained;
  const StepProcess& e = path.extraordinary;
  double t = 0.0;
  while (t < horizon_hours) {
    double next_s = i + 1 < s.breakpoints.size() ? s.breakpoints[i + 1] : horizon_hours;
    double next_e = j + 1 < e.breakpoints.size() ? e.breakpoints[j + 1] : horizon_hours;
    double next = std::min({next_s, next_e, horizon_hours});
    double ratio = gamma_d + s.levels[i] + e.levels[j];
    rep.combined.breakpoints.push_back(t);
    rep.combined.levels.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (next >= horizon_hours) break;
    if (next_s == next) ++i;
    if (next_e == next) ++j;
    t = next;
  }
  rep.ok = true;
  return rep;
}

double damage_failure_time(const Replicate& rep, double unit, double horizon_hours,
                           const ReliabilityConfig& config, PiecewiseProfile& scratch) {
  if (std::isinf(rep.tau_s)) return kInf;
  scratch.breakpoints = rep.combined.breakpoints;
  scratch.levels.resize(rep.combined.levels.size());
  for (std::size_t i = 0; i < scratch.levels.size(); ++i) {
    scratch.levels[i] = unit * rep.combined.levels[i];
  }
  DamageSolution sol;
  if (config.use_ode) {
    sol = integrate_damage(rep.fx, rep.tau_s, LoadProfile{scratch}, horizon_hours,
                           config.ode_step_hours);
  } else {
    sol = propagate_piecewise(rep.fx, rep.tau_s, scratch, horizon_hours);
  }
  return sol.failure_time;
}

}  // namespace

TimeToFailureSamples simulate_time_to_failure(const std::vector<HyperParams>& draws, double phi,
                                              long n_rep, double horizon_hours,
                                              std::uint64_t stream,
                                              const ReliabilityConfig& config) {
  check_reliability_args(draws, n_rep, horizon_hours, config);
  double unit = design_live_load(phi, config.load);
  TimeToFailureSamples out;
  std::size_t n_draws = draws.size();
  std::size_t reps = static_cast<std::size_t>(n_rep);
  out.times.assign(n_draws, std::vector<double>(reps, kInf));
  std::size_t cells = n_draws * reps;
  parallel_for(cells, config.threads, [&](std::size_t cell) {
    std::size_t i = cell / reps;
    std::size_t j = cell % reps;
    std::uint64_t key = substream(substream(stream, i), j);
    PiecewiseProfile scratch;
    try {
      Replicate rep = make_replicate(draws[i], horizon_hours, config, key);
      if (!rep.ok) {
        out.times[i][j] = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      out.times[i][j] = damage_failure_time(rep, unit, horizon_hours, config, scratch);
    } catch (const std::exception&) {
      out.times[i][j] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (const auto& row : out.times) {
    for (double t : row) {
      if (std::isnan(t)) ++out.n_invalid;
    }
  }
  return out;
}

FailureProbability failure_probability(const TimeToFailureSamples& samples,
                                       double horizon_hours) {
  if (samples.times.empty()) throw DomainError("failure_probability: no samples");
  if (!(horizon_hours > 0)) throw DomainError("failure_probability: bad horizon");
  FailureProbability out;
  out.per_draw.reserve(samples.times.size());
  long total_fail = 0, total_valid = 0;
  for (const auto& row : samples.times) {
    long fail = 0, valid = 0;
    for (double t : row) {
      if (std::isnan(t)) continue;
      ++valid;
      if (t < horizon_hours) ++fail;
    }
    if (valid == 0) {
      throw NumericalError("failure_probability: a draw has no valid replicates");
    }
    out.per_draw.push_back(static_cast<double>(fail) / static_cast<double>(valid));
    total_fail += fail;
    total_valid += valid;
  }
  out.pooled = static_cast<double>(total_fail) / static_cast<double>(total_valid);
  return out;
}

FailureProbability overload_failure_probability(const std::vector<HyperParams>& draws,
                                                double phi, long n_rep, double horizon_hours,
                                                std::uint64_t stream,
                                                const ReliabilityConfig& config) {
  check_reliability_args(draws, n_rep, horizon_hours, config);
  double unit = design_live_load(phi, config.load);
  std::size_t n_draws = draws.size();
  std::size_t reps = static_cast<std::size_t>(n_rep);
  // 0 = survived, 1 = failed, 2 = invalid
  std::vector<unsigned char> flags(n_draws * reps, 0);
  parallel_for(flags.size(), config.threads, [&](std::size_t cell) {
    std::size_t i = cell / reps;
    std::size_t j = cell % reps;
    std::uint64_t key = substream(substream(stream, i), j);
    try {
      Replicate rep = make_replicate(draws[i], horizon_hours, config, key);
      if (!rep.ok) {
        flags[cell] = 2;
        return;
      }
      flags[cell] = unit * rep.max_ratio > rep.tau_s ? 1 : 0;
    } catch (const std::exception&) {
      flags[cell] = 2;
    }
  });
  FailureProbability out;
  out.per_draw.reserve(n_draws);
  long total_fail = 0, total_valid = 0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    long fail = 0, valid = 0;
    for (std::size_t j = 0; j < reps; ++j) {
      unsigned char f = flags[i * reps + j];
      if (f == 2) continue;
      ++valid;
      if (f == 1) ++fail;
    }
    if (valid == 0) {
      throw NumericalError("overload_failure_probability: a draw has no valid replicates");
    }
    out.per_draw.push_back(static_cast<double>(fail) / static_cast<double>(valid));
    total_fail += fail;
    total_valid += valid;
  }
  out.pooled = static_cast<double>(total_fail) / static_cast<double>(total_valid);
  return out;
}

double reliability_index(double p_f) {
  return reliability_index(static_cast<long double>(p_f));
}

double reliability_index(long double p_f) {
  if (!(p_f >= 0) || !(p_f <= 1)) throw DomainError("reliability_index: p_f must lie in [0, 1]");
  if (p_f == 0) return kInf;
  if (p_f == 1) return -kInf;
  double beta = -static_cast<double>(normal_quantile(p_f));
  return beta == 0.0 ? 0.0 : beta;
}

std::vector<ReliabilityPoint> phi_beta_curve(const std::vector<HyperParams>& draws,
                                             const std::vector<double>& phi_grid, long n_rep,
                                             double horizon_hours, ReliabilityMode mode,
                                             std::uint64_t stream,
                                             const ReliabilityConfig& config) {
  check_reliability_args(draws, n_rep, horizon_hours, config);
  if (phi_grid.empty()) throw DomainError("phi_beta_curve: empty phi grid");
  for (std::size_t p = 0; p + 1 < phi_grid.size(); ++p) {
    if (!(phi_grid[p] < phi_grid[p + 1])) {
      throw DomainError("phi_beta_curve: phi grid must be strictly increasing");
    }
  }
  std::vector<double> units(phi_grid.size());
  for (std::size_t p = 0; p < phi_grid.size(); ++p) {
    units[p] = design_live_load(phi_grid[p], config.load);
  }

  std::size_t n_draws = draws.size();
  std::size_t reps = static_cast<std::size_t>(n_rep);
  std::size_t n_phi = phi_grid.size();
  std::size_t cells = n_draws * reps;
  // 0 = survived, 1 = failed, 2 = invalid; one flag per (cell, phi)
  std::vector<unsigned char> flags(cells * n_phi, 0);
  parallel_for(cells, config.threads, [&](std::size_t cell) {
    std::size_t i = cell / reps;
    std::size_t j = cell % reps;
    std::uint64_t key = substream(substream(stream, i), j);
    unsigned char* row = flags.data() + cell * n_phi;
    PiecewiseProfile scratch;
    try {
      Replicate rep = make_replicate(draws[i], horizon_hours, config, key);
      if (!rep.ok) {
        for (std::size_t p = 0; p < n_phi; ++p) row[p] = 2;
        return;
      }
      for (std::size_t p = 0; p < n_phi; ++p) {
        if (mode == ReliabilityMode::Overload) {
          row[p] = units[p] * rep.max_ratio > rep.tau_s ? 1 : 0;
        } else {
          double t = damage_failure_time(rep, units[p], horizon_hours, config, scratch);
          row[p] = t < horizon_hours ? 1 : 0;
        }
      }
    } catch (const std::exception&) {
      for (std::size_t p = 0; p < n_phi; ++p) row[p] = 2;
    }
  });

  std::vector<ReliabilityPoint> curve(n_phi);
  for (std::size_t p = 0; p < n_phi; ++p) {
    ReliabilityPoint& pt = curve[p];
    pt.phi = phi_grid[p];
    pt.per_draw_pf.reserve(n_draws);
    long total_fail = 0, total_valid = 0;
    std::vector<double> betas;
    betas.reserve(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
      long fail = 0, valid = 0;
      for (std::size_t j = 0; j < reps; ++j) {
        unsigned char f = flags[(i * reps + j) * n_phi + p];
        if (f == 2) continue;
        ++valid;
        if (f == 1) ++fail;
      }
      if (valid == 0) throw NumericalError("phi_beta_curve: a draw has no valid replicates");
      double pf = static_cast<double>(fail) / static_cast<double>(valid);
      pt.per_draw_pf.push_back(pf);
      betas.push_back(reliability_index(pf));
      total_fail += fail;
      total_valid += valid;
    }
    pt.p_f = static_cast<double>(total_fail) / static_cast<double>(total_valid);
    pt.beta = reliability_index(pt.p_f);
    std::sort(betas.begin(), betas.end());
    pt.beta_lo = empirical_quantile(betas, 0.025);
    pt.beta_hi = empirical_quantile(betas, 0.975);
  }
  return curve;
}

double interpolate_phi_at_beta(const std::vector<std::pair<double, double>>& phi_beta,
                               double target) {
  if (!std::isfinite(target)) throw DomainError("interpolate_phi_at_beta: target must be finite");
  std::vector<double> phi, beta;
  for (const auto& [p, b] : phi_beta) {
    if (!std::isfinite(b)) continue;
    phi.push_back(p);
    beta.push_back(b);
  }
  if (phi.size() < 2) {
    throw DomainError("interpolate_phi_at_beta: fewer than two finite curve points");
  }
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    if (!(phi[i] < phi[i + 1])) {
      throw DomainError("interpolate_phi_at_beta: phi values must be strictly increasing");
    }
  }

  // Pool adjacent violators so beta is nonincreasing in phi before inverting.
  std::vector<double> value = beta;
  std::vector<std::size_t> count(value.size(), 1);
  std::size_t m = 0;
  for (std::size_t i = 0; i < value.size(); ++i) {
    value[m] = value[i];
    count[m] = 1;
    ++m;
    while (m > 1 && value[m - 2] < value[m - 1]) {
      double pooled = (value[m - 2] * static_cast<double>(count[m - 2]) +
                       value[m - 1] * static_cast<double>(count[m - 1])) /
                      static_cast<double>(count[m - 2] + count[m - 1]);
      count[m - 2] += count[m - 1];
      value[m - 2] = pooled;
      --m;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(beta.size());
  for (std::size_t block = 0; block < m; ++block) {
    for (std::size_t r = 0; r < count[block]; ++r) fitted.push_back(value[block]);
  }

  if (target > fitted.front() || target < fitted.back()) {
    throw DomainError("interpolate_phi_at_beta: target index " + std::to_string(target) +
                      " is outside the curve range [" + std::to_string(fitted.back()) + ", " +
                      std::to_string(fitted.front()) + "]");
  }
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    if (fitted[i] == target) return phi[i];
    if (i + 1 < fitted.size() && fitted[i] > target && target > fitted[i + 1]) {
      double w = (fitted[i] - target) / (fitted[i] - fitted[i + 1]);
      return phi[i] + w * (phi[i + 1] - phi[i]);
    }
  }
  throw DomainError("interpolate_phi_at_beta: target not bracketed");
}

KdResult k_d_factor(const std::vector<ReliabilityPoint>& damage_curve,
                    const std::vector<ReliabilityPoint>& overload_curve, double beta_target) {
  if (damage_curve.size() != overload_curve.size() || damage_curve.size() < 2) {
    throw DomainError("k_d_factor: curves must share a grid of at least two points");
  }
  std::size_t n_phi = damage_curve.size();
  std::size_t n_draws = damage_curve.front().per_draw_pf.size();
  for (std::size_t p = 0; p < n_phi; ++p) {
    if (damage_curve[p].phi != overload_curve[p].phi) {
      throw DomainError("k_d_factor: curves evaluated on different phi grids");
    }
    if (damage_curve[p].per_draw_pf.size() != n_draws ||
        overload_curve[p].per_draw_pf.size() != n_draws) {
      throw DomainError("k_d_factor: curves carry inconsistent per-draw data");
    }
  }
  if (!std::isfinite(beta_target)) throw DomainError("k_d_factor: beta_target must be finite");

  KdResult out;
  out.beta_target = beta_target;

  auto pooled_pairs = [&](const std::vector<ReliabilityPoint>& curve) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(n_phi);
    for (const ReliabilityPoint& pt : curve) {
      if (!std::isfinite(pt.beta)) {
        ++out.n_points_excluded;
        continue;
      }
      pairs.push_back({pt.phi, pt.beta});
    }
    return pairs;
  };
  out.phi_damage = interpolate_phi_at_beta(pooled_pairs(damage_curve), beta_target);
  out.phi_overload = interpolate_phi_at_beta(pooled_pairs(overload_curve), beta_target);

  std::vector<double> ratios;
  ratios.reserve(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    std::vector<std::pair<double, double>> dmg, ovl;
    for (std::size_t p = 0; p < n_phi; ++p) {
      double bd = reliability_index(damage_curve[p].per_draw_pf[i]);
      double bo = reliability_index(overload_curve[p].per_draw_pf[i]);
      if (std::isfinite(bd)) dmg.push_back({damage_curve[p].phi, bd});
      if (std::isfinite(bo)) ovl.push_back({overload_curve[p].phi, bo});
    }
    try {
      double phi_d = interpolate_phi_at_beta(dmg, beta_target);
      double phi_o = interpolate_phi_at_beta(ovl, beta_target);
      ratios.push_back(phi_d / phi_o);
    } catch (const DomainError&) {
      continue;  // this draw's curves do not bracket the target
    }
  }
  if (ratios.empty()) {
    // No single draw's curve brackets the target (per-draw failure fractions
    // are too coarse for extreme betas); fall back to the pooled-curve ratio
    // with a degenerate interval.
    out.k_d = out.phi_damage / out.phi_overload;
    out.k_d_lo = out.k_d;
    out.k_d_hi = out.k_d;
    out.n_draws_used = 0;
    return out;
  }
  out.n_draws_used = static_cast<long>(ratios.size());
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  out.k_d = mean;
  std::sort(ratios.begin(), ratios.end());
  out.k_d_lo = std::min(empirical_quantile(ratios, 0.025), mean);
  out.k_d_hi = std::max(empirical_quantile(ratios, 0.975), mean);
  return out;
}

}  // namespace admkit
