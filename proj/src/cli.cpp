#include "admkit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "admkit/parallel.hpp"

namespace admkit {

namespace {

HyperParams read_theta(RunConfig& config, const std::string& prefix) {
  Vector10 v;
  const auto& names = HyperParams::field_names();
  for (int i = 0; i < 10; ++i) {
    v[i] = config.get_double(prefix + names[i]);
  }
  HyperParams theta = HyperParams::from_vector(v);
  if (!theta.finite() || !theta.scales_positive()) {
    throw ConfigError(config.origin() + ": '" + prefix +
                      "*' must be finite with positive sigma components");
  }
  return theta;
}

int global_threads(RunConfig& config) {
  return resolve_threads(static_cast<int>(config.get_long_or("threads", 0)));
}

// Indices appearing as dataset.<i>.<field>, sorted.
std::vector<long> dataset_indices(const RunConfig& config) {
  std::set<long> found;
  for (const std::string& key : config.keys_with_prefix("dataset.")) {
    std::string rest = key.substr(8);
    std::size_t dot = rest.find('.');
    if (dot == std::string::npos || dot == 0) {
      throw ConfigError("expected dataset.<index>.<field>, got '" + key + "'");
    }
    std::string idx = rest.substr(0, dot);
    try {
      std::size_t pos = 0;
      long i = std::stol(idx, &pos);
      if (pos != idx.size() || i < 1) throw std::invalid_argument(idx);
      found.insert(i);
    } catch (const std::exception&) {
      throw ConfigError("dataset index in '" + key + "' must be a positive integer");
    }
  }
  return {found.begin(), found.end()};
}

TestConfig read_test_config(RunConfig& config, const std::string& prefix) {
  TestConfig tc;
  tc.n_boards = config.get_long(prefix + "n_boards");
  tc.tau_c = config.get_double(prefix + "tau_c");
  tc.censor_hours = config.get_double(prefix + "censor_hours");
  tc.k = config.get_double_or(prefix + "k", kStandardRampRate);
  try {
    tc.validate();
  } catch (const DomainError& err) {
    throw ConfigError(config.origin() + ": " + prefix + "*: " + err.what());
  }
  if (tc.n_boards < 1) throw ConfigError(config.origin() + ": " + prefix + "n_boards must be >= 1");
  return tc;
}

}  // namespace

void cmd_simulate(RunConfig& config) {
  std::uint64_t seed = config.get_uint64("seed");
  int threads = global_threads(config);
  HyperParams theta = read_theta(config, "theta.");
  std::string prefix = config.get_string("simulate.output_prefix");
  std::vector<long> indices = dataset_indices(config);
  if (indices.empty()) {
    throw ConfigError(config.origin() + ": no dataset.<i>.* sections found");
  }
  std::uint64_t base = substream(seed, "simulate");
  for (long idx : indices) {
    TestConfig tc = read_test_config(config, "dataset." + std::to_string(idx) + ".");
    std::vector<BoardOutcome> boards =
        simulate_boards(theta, tc, substream(base, static_cast<std::uint64_t>(idx)), threads);
    long n_ramp = 0, n_constant = 0, n_censored = 0;
    for (const BoardOutcome& b : boards) {
      if (!(b.time < tc.censor_hours)) {
        ++n_censored;
      } else if (b.phase == FailurePhase::Ramp) {
        ++n_ramp;
      } else {
        ++n_constant;
      }
    }
    std::string path = prefix + std::to_string(idx) + ".csv";
    write_dataset(path, boards, tc);
    std::printf("dataset %ld: %ld boards -> %ld ramp failures, %ld constant-load failures, "
                "%ld censored -> %s\n",
                idx, tc.n_boards, n_ramp, n_constant, n_censored, path.c_str());
  }
  config.ensure_consumed();
}

void cmd_fit(RunConfig& config) {
  ChainConfig chain;
  chain.seed = config.get_uint64("seed");
  chain.threads = global_threads(config);

  std::vector<std::string> dataset_paths = config.get_string_list("fit.datasets");
  for (const std::string& p : dataset_paths) {
    chain.datasets.push_back(read_dataset(p));
  }
  chain.burn_in = config.get_long("fit.burn_in");
  chain.thin = config.get_long("fit.thin");
  chain.n_draws = config.get_long("fit.n_draws");
  chain.start = read_theta(config, "fit.start.");
  if (config.has("fit.proposal_diag")) {
    std::vector<double> diag = config.get_double_list("fit.proposal_diag");
    if (diag.size() != 10) {
      throw ConfigError(config.origin() + ": fit.proposal_diag needs exactly 10 values");
    }
    Vector10 d;
    for (int i = 0; i < 10; ++i) d[i] = diag[i];
    chain.proposal = ProposalSpec(d);
  }
  chain.standardize = config.get_bool_or("fit.standardize", true);
  chain.pilot_replicates = static_cast<int>(config.get_long_or("fit.pilot_replicates", 200));
  std::string output = config.get_string("fit.output");

  bool calibrated = false;
  bool warning = false;
  if (config.has("fit.delta") && config.has("fit.calibrate.candidates")) {
    throw ConfigError(config.origin() + ": give either fit.delta or fit.calibrate.candidates");
  }
  if (config.has("fit.calibrate.candidates")) {
    std::vector<double> candidates = config.get_double_list("fit.calibrate.candidates");
    long pilot_iters = config.get_long_or("fit.calibrate.pilot_iterations", 2000);
    CalibrationResult cal = calibrate_bandwidth(candidates, pilot_iters, chain);
    std::vector<double> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      std::printf("calibration: delta %s -> acceptance %.4f\n",
                  format_double(sorted[i]).c_str(), cal.acceptance_rates[i]);
    }
    if (cal.warning) {
      std::printf("warning: no candidate reached 1%% acceptance; using the largest\n");
    }
    chain.delta = cal.delta;
    calibrated = true;
    warning = cal.warning;
  } else {
    chain.delta = config.get_double("fit.delta");
  }
  config.ensure_consumed();

  ChainResult result = run_chain(chain);
  write_chain(output, result, chain, dataset_paths, calibrated, warning);
  std::printf("chain: %ld iterations, delta %s, acceptance %.4f, %ld retained draws -> %s\n",
              result.n_iterations, format_double(chain.delta).c_str(), result.acceptance_rate,
              static_cast<long>(result.draws.size()), output.c_str());
}

void cmd_oracle(RunConfig& config) {
  std::uint64_t seed = config.get_uint64("seed");
  int threads = global_threads(config);
  long n_sim = config.get_long_or("oracle.n_sim", 100000);
  bool truncated = config.get_bool_or("oracle.truncated", false);
  std::string output = config.get_string("oracle.output");

  std::vector<CensoredSample> datasets;
  for (const std::string& p : config.get_string_list("oracle.datasets")) {
    datasets.push_back(read_dataset(p));
  }

  struct Row {
    std::string label;
    HyperParams theta;
    double ll = 0;
    double lp = 0;
  };
  std::vector<Row> rows;
  bool has_true = false;
  if (config.has("theta.mu_a")) {
    rows.push_back({"true", read_theta(config, "theta."), 0, 0});
    has_true = true;
  }
  if (config.has("oracle.chain")) {
    LoadedChain chain = read_chain(config.get_string("oracle.chain"));
    long limit = config.get_long_or("oracle.draw_limit", 0);
    std::size_t n = chain.draws.size();
    if (limit > 0 && static_cast<std::size_t>(limit) < n) n = static_cast<std::size_t>(limit);
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back({"draw_" + std::to_string(chain.draws[i].first), chain.draws[i].second, 0, 0});
    }
  }
  if (rows.empty()) {
    throw ConfigError(config.origin() + ": oracle needs theta.* or oracle.chain");
  }
  config.ensure_consumed();

  std::uint64_t base = substream(seed, "oracle");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double ll = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      ll += kde_log_likelihood(datasets[d], rows[r].theta, n_sim,
                               substream(substream(base, r), d), threads, truncated);
    }
    rows[r].ll = ll;
    rows[r].lp = ll + log_prior(rows[r].theta);
  }

  std::size_t first_ranked = has_true ? 1 : 0;
  std::stable_sort(rows.begin() + first_ranked, rows.end(),
                   [](const Row& a, const Row& b) { return a.ll > b.ll; });

  std::ofstream out(output);
  if (!out) throw ConfigError("cannot open '" + output + "' for writing");
  out << "label";
  for (const char* name : HyperParams::field_names()) out << "," << name;
  out << ",log_likelihood,log_posterior\n";
  for (const Row& row : rows) {
    out << row.label;
    Vector10 v = row.theta.as_vector();
    for (int i = 0; i < 10; ++i) out << "," << format_double(v[i]);
    out << "," << format_double(row.ll) << "," << format_double(row.lp) << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + output + "'");
  std::printf("oracle: %ld evaluations over %ld datasets (n_sim %ld) -> %s\n",
              static_cast<long>(rows.size()), static_cast<long>(datasets.size()), n_sim,
              output.c_str());
}

void cmd_reliability(RunConfig& config) {
  std::uint64_t seed = config.get_uint64("seed");
  ReliabilityConfig rc;
  rc.threads = global_threads(config);
  rc.k_s = config.get_double_or("reliability.k", kStandardRampRate);
  std::string engine = config.get_string_or("reliability.engine", "exact");
  if (engine == "ode") {
    rc.use_ode = true;
  } else if (engine != "exact") {
    throw ConfigError(config.origin() + ": reliability.engine must be 'exact' or 'ode'");
  }
  rc.ode_step_hours = config.get_double_or("reliability.ode_step_hours", 1.0);

  LoadModelParams& lp = rc.load;
  lp.dead_mean = config.get_double_or("load.dead_mean", lp.dead_mean);
  lp.dead_sd = config.get_double_or("load.dead_sd", lp.dead_sd);
  lp.occupancy_mean_years = config.get_double_or("load.occupancy_mean_years", lp.occupancy_mean_years);
  lp.sustained_shape = config.get_double_or("load.sustained_shape", lp.sustained_shape);
  lp.sustained_scale = config.get_double_or("load.sustained_scale", lp.sustained_scale);
  lp.extra_gap_mean_years = config.get_double_or("load.extra_gap_mean_years", lp.extra_gap_mean_years);
  lp.extra_duration_mean_years =
      config.get_double_or("load.extra_duration_mean_years", lp.extra_duration_mean_years);
  lp.extra_shape = config.get_double_or("load.extra_shape", lp.extra_shape);
  lp.extra_scale = config.get_double_or("load.extra_scale", lp.extra_scale);
  lp.dead_to_live_ratio = config.get_double_or("design.dead_to_live_ratio", lp.dead_to_live_ratio);
  lp.dead_factor = config.get_double_or("design.dead_factor", lp.dead_factor);
  lp.live_factor = config.get_double_or("design.live_factor", lp.live_factor);
  lp.characteristic_strength =
      config.get_double_or("design.characteristic_strength", lp.characteristic_strength);

  std::vector<HyperParams> draws;
  if (config.has("reliability.chain")) {
    LoadedChain chain = read_chain(config.get_string("reliability.chain"));
    long want = config.get_long_or("reliability.n_theta", 0);
    std::size_t total = chain.draws.size();
    if (want <= 0 || static_cast<std::size_t>(want) >= total) {
      for (const auto& [iter, theta] : chain.draws) draws.push_back(theta);
    } else {
      // evenly spaced subsample, deterministic in the draw order
      for (long i = 0; i < want; ++i) {
        std::size_t idx = static_cast<std::size_t>(i) * total / static_cast<std::size_t>(want);
        draws.push_back(chain.draws[idx].second);
      }
    }
  } else {
    draws.push_back(read_theta(config, "theta."));
  }

  long n_rep = config.get_long("reliability.n_rep");
  double horizon = config.get_double_or("reliability.horizon_years", 30.0) * kHoursPerYear;
  std::vector<double> phi_grid = config.get_double_list("reliability.phi_grid");
  std::vector<double> beta_targets;
  if (config.has("reliability.beta_targets")) {
    beta_targets = config.get_double_list("reliability.beta_targets");
  }
  std::string curve_output = config.get_string("reliability.curve_output");
  std::string kd_output = config.get_string_or("reliability.kd_output", "");
  if (!beta_targets.empty() && kd_output.empty()) {
    throw ConfigError(config.origin() + ": reliability.beta_targets needs reliability.kd_output");
  }

  std::string path_output = config.get_string_or("reliability.path_output", "");
  double path_phi = config.get_double_or("reliability.path_phi", 1.0);
  std::string times_output = config.get_string_or("reliability.failure_times_output", "");
  double times_phi = config.get_double_or("reliability.failure_times_phi", 3.0);
  config.ensure_consumed();

  std::uint64_t stream = substream(seed, "reliability");
  std::vector<ReliabilityPoint> damage_curve =
      phi_beta_curve(draws, phi_grid, n_rep, horizon, ReliabilityMode::Damage, stream, rc);
  std::vector<ReliabilityPoint> overload_curve =
      phi_beta_curve(draws, phi_grid, n_rep, horizon, ReliabilityMode::Overload, stream, rc);
  write_curve_csv(curve_output, damage_curve, overload_curve);
  for (std::size_t p = 0; p < damage_curve.size(); ++p) {
    std::printf("phi %6s: damage p_f %.6g beta %s | overload p_f %.6g beta %s\n",
                format_double(damage_curve[p].phi).c_str(), damage_curve[p].p_f,
                format_double(damage_curve[p].beta).c_str(), overload_curve[p].p_f,
                format_double(overload_curve[p].beta).c_str());
  }

  if (!beta_targets.empty()) {
    std::vector<KdResult> kd_rows;
    for (double target : beta_targets) {
      KdResult kd = k_d_factor(damage_curve, overload_curve, target);
      kd_rows.push_back(kd);
      std::printf("beta %s: phi1 %.4f phi2 %.4f kd %.4f (%.4f, %.4f) from %ld draws\n",
                  format_double(target).c_str(), kd.phi_overload, kd.phi_damage, kd.k_d,
                  kd.k_d_lo, kd.k_d_hi, kd.n_draws_used);
    }
    write_kd_csv(kd_output, kd_rows);
  }

  if (!path_output.empty()) {
    Rng rng(substream(seed, "path-dump"));
    LoadPath path = sample_load_path(rc.load, horizon, rng);
    write_load_path_csv(path_output, assemble_load(path, path_phi, rc.load), horizon);
  }
  if (!times_output.empty()) {
    TimeToFailureSamples samples = simulate_time_to_failure(
        draws, times_phi, n_rep, horizon, substream(seed, "failure-times"), rc);
    write_failure_times_csv(times_output, samples);
  }
  std::printf("reliability: %ld draws x %ld replicates over %s hours -> %s\n",
              static_cast<long>(draws.size()), n_rep, format_double(horizon).c_str(),
              curve_output.c_str());
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Accumulated-damage lumber reliability toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  long threads_override = -1;
  std::string seed_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--threads", threads_override, "Worker thread count (overrides config)");
    sub->add_option("--seed", seed_override, "Random seed (overrides config)");
  };
  CLI::App* sim = app.add_subcommand("simulate", "Generate censored ramp-test datasets");
  CLI::App* fit = app.add_subcommand("fit", "Fit the population model by ABC-MCMC");
  CLI::App* oracle = app.add_subcommand("oracle", "Score chain draws by simulated likelihood");
  CLI::App* rel = app.add_subcommand("reliability", "Long-term reliability under service loads");
  for (CLI::App* sub : {sim, fit, oracle, rel}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig config = RunConfig::parse_file(config_path);
    if (threads_override >= 0) config.set("threads", std::to_string(threads_override));
    if (!seed_override.empty()) config.set("seed", seed_override);
    if (sim->parsed()) {
      cmd_simulate(config);
    } else if (fit->parsed()) {
      cmd_fit(config);
    } else if (oracle->parsed()) {
      cmd_oracle(config);
    } else {
      cmd_reliability(config);
    }
  } catch (const ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 3;
  }
  return 0;
}

}  // namespace admkit
