// Acceptance suite: one self-contained check per shipped guarantee.  Each
// check prints a [PASS]/[FAIL] line with timing and indented diagnostics; the
// process exit status is the number of failed checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "admkit/abc.hpp"
#include "admkit/cli.hpp"
#include "admkit/damage.hpp"
#include "admkit/hier.hpp"
#include "admkit/io.hpp"
#include "admkit/load_process.hpp"
#include "admkit/parallel.hpp"
#include "admkit/reliability.hpp"
#include "admkit/rng.hpp"
#include "admkit/simulate.hpp"
#include "admkit/special.hpp"
#include "oracles.hpp"

using namespace admkit;

namespace {

constexpr std::uint64_t kSeed = 0x5eed2029ull;

int g_threads = 1;

// State carried between checks: the single-test chain feeds both the
// two-test comparison and the reliability posterior draws.
struct Shared {
  HyperParams truth = testutil::bench_theta();
  CensoredSample data1;
  CensoredSample data2;
  std::vector<HyperParams> draws1;
  std::vector<double> lls1;
  double ll_true1 = std::numeric_limits<double>::quiet_NaN();
  double delta1 = 0.0;  // bandwidth calibrated on the single-test chain
  bool chain1_ok = false;
};

using Notes = std::vector<std::string>;

std::string fmt(const char* format, ...) {
  char buf[768];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return std::string(buf);
}

double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

bool same_theta(const HyperParams& x, const HyperParams& y) {
  Vector10 a = x.as_vector();
  Vector10 b = y.as_vector();
  for (int i = 0; i < 10; ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

double quantile_of(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return empirical_quantile(values, p);
}

// Bandwidths, in standardized summary coordinates, swept when calibrating a
// chain to roughly 1% acceptance.  Spaced by factors of about 1.5; short
// pilots read a little hot relative to a full 20,000-iteration run, so the
// smallest candidate clearing the 1% pilot bar lands the long-run rate
// inside the 0.5%-2% target window.
const std::vector<double> kDeltaCandidates = {2.7, 4.0, 6.0, 9.0, 13.0};

// ---------------------------------------------------------------------------
// 1. Closed-form ramp and ramp-then-hold failure times agree with the
//    Adams-Bashforth integrator at the population point estimate.
bool check_analytic_vs_ode(Shared& sh, Notes& notes) {
  auto begin = std::chrono::steady_clock::now();
  Rng rng(substream(kSeed, "analytic-ode"));
  const double k = kStandardRampRate;
  const double tau_c = 4500.0;
  const double t0 = tau_c / k;
  double worst_ramp = 0.0;
  double worst_hold = 0.0;
  int n_ramp = 0, n_hold = 0, n_survived = 0;
  for (int i = 0; i < 200; ++i) {
    RandomEffects fx = sample_effects(sh.truth, rng);
    double T = ramp_failure_time(fx, k);
    double tau_s = k * T;

    RampConstantProfile pure_ramp{k, kInf};
    DamageSolution ramp_ode = integrate_damage(fx, tau_s, pure_ramp, 1.5 * T, T / 20000.0);
    if (!ramp_ode.failed()) {
      notes.push_back(fmt("draw %d: ramp ODE run reached t_max without failing", i));
      return false;
    }
    worst_ramp = std::max(worst_ramp, rel_err(ramp_ode.failure_time, T));

    DamageSolution sol = constant_load_failure_time(fx, k, tau_c);
    RampConstantProfile prof{k, tau_c};
    if (sol.phase == FailurePhase::Ramp) {
      // The board breaks before the hold level is reached, so the profiles
      // coincide over the solution and the pure-ramp comparison covers it.
      ++n_ramp;
      if (rel_err(sol.failure_time, T) > 1e-9) {
        notes.push_back(fmt("draw %d: ramp-phase hold solution disagrees with the ramp form", i));
        return false;
      }
    } else if (sol.phase == FailurePhase::Constant) {
      ++n_hold;
      DamageSolution ramp_leg = integrate_damage(fx, tau_s, prof, t0, t0 / 20000.0);
      if (ramp_leg.failed()) {
        notes.push_back(fmt("draw %d: ODE failed during the ramp leg unexpectedly", i));
        return false;
      }
      double span = sol.failure_time - t0;
      if (!(span > 0)) continue;  // failure exactly at the ramp end: nothing to integrate
      DamageSolution hold = integrate_damage(fx, tau_s, prof, sol.failure_time + 0.5 * span,
                                             span / 40000.0, ramp_leg.alpha_final, t0);
      if (!hold.failed()) {
        notes.push_back(fmt("draw %d: hold-phase ODE run reached t_max without failing", i));
        return false;
      }
      worst_hold = std::max(worst_hold, rel_err(hold.failure_time, sol.failure_time));
    } else {
      // Hold level at or below the stress threshold: the ODE must stay flat.
      ++n_survived;
      DamageSolution ramp_leg = integrate_damage(fx, tau_s, prof, t0, t0 / 20000.0);
      DamageSolution flat =
          integrate_damage(fx, tau_s, prof, 4.0 * t0, t0 / 1000.0, ramp_leg.alpha_final, t0);
      if (ramp_leg.failed() || flat.failed()) {
        notes.push_back(fmt("draw %d: ODE failed although the closed form predicts survival", i));
        return false;
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  notes.push_back(fmt("200 draws: %d ramp failures, %d hold failures, %d survivors", n_ramp,
                      n_hold, n_survived));
  notes.push_back(fmt("worst relative error: ramp %.3e, hold %.3e (tolerance 1e-3)", worst_ramp,
                      worst_hold));
  notes.push_back(fmt("runtime %.1f s (limit 60 s)", secs));
  return worst_ramp <= 1e-3 && worst_hold <= 1e-3 && secs < 60.0;
}

// ---------------------------------------------------------------------------
// 2. With equal exponents the ramp failure time has a closed form; the
//    root-finding solver must reproduce it.
bool check_equal_exponent(Shared&, Notes& notes) {
  Rng rng(substream(kSeed, "equal-bn"));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    RandomEffects fx;
    fx.a = std::exp(-9.0 + 3.0 * rng.uniform());
    fx.c = std::exp(-25.0 + 5.0 * rng.uniform());
    fx.n = 1.2 + 6.8 * rng.uniform();
    fx.b = fx.n;
    fx.sigma0 = 0.3 + 0.4 * rng.uniform();
    double want = testutil::equal_exponent_ramp_time(fx, kStandardRampRate);
    if (!(want > 1e-10 && want < 1e10)) {
      notes.push_back(fmt("set %d: closed-form time %g outside the solver bracket", i, want));
      return false;
    }
    worst = std::max(worst, rel_err(ramp_failure_time(fx, kStandardRampRate), want));
  }
  notes.push_back(fmt("worst relative error %.3e over 100 parameter sets (tolerance 1e-8)", worst));
  return worst <= 1e-8;
}

// ---------------------------------------------------------------------------
// 3. The lower incomplete gamma implementation agrees with an independent
//    adaptive-quadrature evaluation across a broad (s, x) grid.
bool check_gamma_grid(Shared&, Notes& notes) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double s = 0.1 + static_cast<double>(i) * (49.9 / 19.0);
    for (int j = 0; j < 20; ++j) {
      double x = static_cast<double>(j) * (500.0 / 19.0);
      double got = lower_incomplete_gamma(s, x);
      if (j == 0) {
        if (got != 0.0) {
          notes.push_back(fmt("s = %.3f: expected exactly 0 at x = 0, got %g", s, got));
          return false;
        }
        continue;
      }
      worst = std::max(worst, rel_err(got, testutil::lower_gamma_quadrature(s, x)));
    }
  }
  notes.push_back(fmt("worst relative error %.3e on the 20x20 grid (tolerance 1e-10)", worst));
  return worst <= 1e-10;
}

// ---------------------------------------------------------------------------
// 4. A 20,000-iteration chain on one simulated 300-board test, with the
//    kernel bandwidth calibrated to roughly 1% acceptance, keeps at least 90%
//    of its retained draws inside a 110-log-unit band around the simulated
//    log likelihood of the generating parameters.
bool check_scenario1(Shared& sh, Notes& notes) {
  TestConfig cfg;
  cfg.tau_c = 4500.0;
  cfg.censor_hours = kHoursPerYear;
  cfg.n_boards = 300;
  sh.data1 = simulate_failure_times(sh.truth, cfg, substream(kSeed, "dataset-1"), g_threads);
  notes.push_back(fmt("dataset 1: %zu failures observed, %ld censored", sh.data1.times.size(),
                      sh.data1.n_censored));

  ChainConfig base;
  base.datasets = {sh.data1};
  base.start = sh.truth;
  base.seed = substream(kSeed, "chain-1");
  base.threads = g_threads;
  CalibrationResult cal = calibrate_bandwidth(kDeltaCandidates, 2000, base);
  for (std::size_t i = 0; i < kDeltaCandidates.size(); ++i) {
    notes.push_back(fmt("pilot delta %.2f -> acceptance %.2f%%", kDeltaCandidates[i],
                        100.0 * cal.acceptance_rates[i]));
  }
  notes.push_back(fmt("calibrated delta %.2f%s", cal.delta, cal.warning ? " (warning)" : ""));

  base.delta = cal.delta;
  sh.delta1 = cal.delta;
  base.burn_in = 4000;
  base.thin = 40;
  base.n_draws = 400;
  ChainResult res = run_chain(base);
  notes.push_back(fmt("main chain: %ld iterations, acceptance %.2f%% (target 0.5%%-2%%)",
                      res.n_iterations, 100.0 * res.acceptance_rate));
  bool rate_ok = res.acceptance_rate >= 0.005 && res.acceptance_rate <= 0.02;

  std::uint64_t ll_stream = substream(kSeed, "ll-data1");
  sh.ll_true1 = kde_log_likelihood(sh.data1, sh.truth, 100000, ll_stream, g_threads);
  double lo = sh.ll_true1 - 105.0;
  double hi = sh.ll_true1 + 5.0;
  long in_band = 0;
  double ll_min = kInf, ll_max = -kInf;
  HyperParams prev;
  double prev_ll = 0.0;
  bool have_prev = false;
  for (const ChainDraw& d : res.draws) {
    double ll;
    if (have_prev && same_theta(d.state.theta, prev)) {
      ll = prev_ll;  // repeated retained state: reuse the simulated likelihood
    } else {
      ll = kde_log_likelihood(sh.data1, d.state.theta, 100000, ll_stream, g_threads);
      prev = d.state.theta;
      prev_ll = ll;
      have_prev = true;
    }
    sh.draws1.push_back(d.state.theta);
    sh.lls1.push_back(ll);
    if (ll >= lo && ll <= hi) ++in_band;
    ll_min = std::min(ll_min, ll);
    ll_max = std::max(ll_max, ll);
  }
  sh.chain1_ok = !sh.draws1.empty();
  double frac = static_cast<double>(in_band) / static_cast<double>(res.draws.size());
  notes.push_back(fmt("log likelihood at the generating parameters: %.2f", sh.ll_true1));
  notes.push_back(fmt("draw log likelihoods span [%.2f, %.2f]", ll_min, ll_max));
  notes.push_back(fmt("%.1f%% of draws inside [%.2f, %.2f] (need >= 90%%)", 100.0 * frac, lo, hi));
  return rate_ok && frac >= 0.90;
}

// ---------------------------------------------------------------------------
// 5. Adding a second, longer test strictly shrinks the central 95% range of
//    the retained draws' log likelihoods.
bool check_scenario2(Shared& sh, Notes& notes) {
  if (!sh.chain1_ok) {
    notes.push_back("single-test chain unavailable; cannot compare ranges");
    return false;
  }
  TestConfig cfg;
  cfg.tau_c = 3000.0;
  cfg.censor_hours = 4.0 * kHoursPerYear;
  cfg.n_boards = 200;
  sh.data2 = simulate_failure_times(sh.truth, cfg, substream(kSeed, "dataset-2"), g_threads);
  notes.push_back(fmt("dataset 2: %zu failures observed, %ld censored", sh.data2.times.size(),
                      sh.data2.n_censored));

  ChainConfig base;
  base.datasets = {sh.data1, sh.data2};
  base.start = sh.truth;
  base.seed = substream(kSeed, "chain-2");
  base.threads = g_threads;
  // A controlled comparison: the only change from the single-test chain is
  // the added dataset, so the kernel bandwidth is carried over unchanged
  // rather than recalibrated.
  base.delta = sh.delta1;
  notes.push_back(fmt("bandwidth carried over from the single-test chain: %.2f", base.delta));
  base.burn_in = 4000;
  base.thin = 40;
  base.n_draws = 400;
  ChainResult res = run_chain(base);
  notes.push_back(fmt("main chain: acceptance %.2f%%", 100.0 * res.acceptance_rate));

  std::uint64_t ll_stream1 = substream(kSeed, "ll-data1");
  std::uint64_t ll_stream2 = substream(kSeed, "ll-data2");
  std::vector<double> lls;
  lls.reserve(res.draws.size());
  HyperParams prev;
  double prev_ll = 0.0;
  bool have_prev = false;
  for (const ChainDraw& d : res.draws) {
    double ll;
    if (have_prev && same_theta(d.state.theta, prev)) {
      ll = prev_ll;
    } else {
      ll = kde_log_likelihood(sh.data1, d.state.theta, 100000, ll_stream1, g_threads) +
           kde_log_likelihood(sh.data2, d.state.theta, 100000, ll_stream2, g_threads);
      prev = d.state.theta;
      prev_ll = ll;
      have_prev = true;
    }
    lls.push_back(ll);
  }
  double width1 = quantile_of(sh.lls1, 0.975) - quantile_of(sh.lls1, 0.025);
  double width2 = quantile_of(lls, 0.975) - quantile_of(lls, 0.025);
  notes.push_back(fmt("central 95%% log-likelihood range: one test %.2f, two tests %.2f", width1,
                      width2));
  return width2 < width1;
}

// ---------------------------------------------------------------------------
// 6. The Metropolis acceptance probability reproduces a hand-computed
//    censoring example and factorizes over datasets.
bool check_accept_ratio(Shared&, Notes& notes) {
  CensoredSample data;
  data.config = TestConfig{kStandardRampRate, 4500.0, 8760.0, 100};
  for (int i = 0; i < 60; ++i) data.times.push_back(10.0 + static_cast<double>(i));
  data.n_censored = 40;

  ChainConfig config;
  config.datasets = {data};
  config.delta = 1.0;
  ChainContext ctx;
  ctx.s_obs = {SummaryVec::Zero()};
  ctx.transforms = {SummaryTransform{}};

  ChainState cur, prop;
  cur.summaries = {SummaryVec::Constant(0.3)};
  prop.summaries = {SummaryVec::Constant(0.3)};
  cur.p_hat = {0.6};
  prop.p_hat = {0.7};

  // 60 observed failures and 40 censored boards with the simulated failure
  // fraction moving 0.6 -> 0.7 and everything else equal.
  double got = abc_accept_ratio(cur, prop, 1.0, config, ctx);
  double want = std::exp(60.0 * std::log(0.7 / 0.6) + 40.0 * std::log(0.3 / 0.4));
  notes.push_back(fmt("single dataset: got %.9f, hand value %.9f", got, want));
  if (std::fabs(got - want) > 1e-6) return false;

  // A second dataset multiplies in its own censoring factor, so dropping it
  // recovers the single-dataset form exactly.
  CensoredSample extra;
  extra.config = TestConfig{kStandardRampRate, 3000.0, 8760.0, 50};
  for (int i = 0; i < 40; ++i) extra.times.push_back(5.0 + static_cast<double>(i));
  extra.n_censored = 10;
  ChainConfig two = config;
  two.datasets.push_back(extra);
  ChainContext ctx2 = ctx;
  ctx2.s_obs.push_back(SummaryVec::Zero());
  ctx2.transforms.push_back(SummaryTransform{});
  ChainState cur2 = cur, prop2 = prop;
  cur2.summaries.push_back(SummaryVec::Constant(0.1));
  prop2.summaries.push_back(SummaryVec::Constant(0.1));
  cur2.p_hat.push_back(0.5);
  prop2.p_hat.push_back(0.45);
  double got2 = abc_accept_ratio(cur2, prop2, 1.0, two, ctx2);
  double factor2 = std::exp(40.0 * std::log(0.45 / 0.5) + 10.0 * std::log(0.55 / 0.5));
  notes.push_back(fmt("two datasets: got %.9f, product form %.9f", got2, got * factor2));
  return std::fabs(got2 - got * factor2) <= 1e-12 * got2;
}

// ---------------------------------------------------------------------------
// 7. Long-run load-process moments: the sustained-load time average and the
//    extraordinary-episode time fraction match their analytic targets over
//    100,000 simulated years.
bool check_load_moments(Shared&, Notes& notes) {
  LoadModelParams params;
  const int n_blocks = 100;
  const double horizon = 1000.0 * kHoursPerYear;
  std::vector<double> avg(n_blocks), frac(n_blocks);
  std::uint64_t base = substream(kSeed, "load-blocks");
  parallel_for(n_blocks, g_threads, [&](std::size_t b) {
    Rng rng(substream(base, b));
    LoadPath path = sample_load_path(params, horizon, rng);
    avg[b] = time_average(path.sustained, horizon);
    frac[b] = time_fraction_positive(path.extraordinary, horizon);
  });
  auto block_stats = [n_blocks](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n_blocks;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double se = std::sqrt(ss / (n_blocks - 1)) / std::sqrt(static_cast<double>(n_blocks));
    return std::pair<double, double>(mean, se);
  };
  auto [avg_mean, avg_se] = block_stats(avg);
  auto [frac_mean, frac_se] = block_stats(frac);
  double avg_want = params.sustained_shape * params.sustained_scale;
  double frac_want = params.extra_duration_mean_years /
                     (params.extra_gap_mean_years + params.extra_duration_mean_years);
  notes.push_back(fmt("sustained time average %.6f vs %.6f (|z| = %.2f)", avg_mean, avg_want,
                      std::fabs(avg_mean - avg_want) / avg_se));
  notes.push_back(fmt("extraordinary time fraction %.6f vs %.6f (|z| = %.2f)", frac_mean,
                      frac_want, std::fabs(frac_mean - frac_want) / frac_se));
  return std::fabs(avg_mean - avg_want) <= 3.0 * avg_se &&
         std::fabs(frac_mean - frac_want) <= 3.0 * frac_se;
}

// ---------------------------------------------------------------------------
// 8. Reliability orderings on common random numbers: the index decreases in
//    the performance factor in both modes, ignoring damage accumulation never
//    lowers the curve, and the duration-of-load factor lies in (0, 1].
bool check_reliability_orderings(Shared& sh, Notes& notes) {
  std::vector<HyperParams> draws;
  if (sh.chain1_ok && sh.draws1.size() >= 50) {
    std::size_t n = sh.draws1.size();
    for (std::size_t i = 0; i < 50; ++i) draws.push_back(sh.draws1[i * n / 50]);
    notes.push_back("50 draws thinned from the single-test chain");
  } else {
    ProposalSpec spec;
    Rng rng(substream(kSeed, "fallback-draws"));
    for (int i = 0; i < 50; ++i) draws.push_back(propose(sh.truth, spec, rng));
    notes.push_back("chain unavailable: 50 jittered draws around the point estimate");
  }

  ReliabilityConfig rc;
  rc.threads = g_threads;
  // The half-step grid is the reporting range; the extra 0.3 point extends
  // the pooled curves above beta = 3.5 (at phi = 0.5 the pooled damage curve
  // sits near beta 3.2-3.5, so the highest duration-of-load target would
  // otherwise fall outside the invertible range).
  const std::vector<double> grid = {0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const double horizon = 30.0 * kHoursPerYear;
  std::uint64_t stream = substream(kSeed, "phi-beta");
  auto damage = phi_beta_curve(draws, grid, 2000, horizon, ReliabilityMode::Damage, stream, rc);
  auto overload =
      phi_beta_curve(draws, grid, 2000, horizon, ReliabilityMode::Overload, stream, rc);

  bool ok = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    notes.push_back(fmt("phi %.1f: p_f damage %.5f (beta %.3f), overload %.5f (beta %.3f)",
                        grid[i], damage[i].p_f, damage[i].beta, overload[i].p_f,
                        overload[i].beta));
    if (i > 0 && (damage[i].p_f < damage[i - 1].p_f || overload[i].p_f < overload[i - 1].p_f)) {
      notes.push_back(fmt("ordering violated: failure probability dropped at phi %.1f", grid[i]));
      ok = false;
    }
    if (overload[i].p_f > damage[i].p_f) {
      notes.push_back(fmt("ordering violated: overload exceeds damage at phi %.1f", grid[i]));
      ok = false;
    }
  }
  for (double target : {2.5, 3.0, 3.5}) {
    try {
      KdResult kd = k_d_factor(damage, overload, target);
      notes.push_back(fmt("K_D at beta %.1f: %.3f [%.3f, %.3f] from %ld draws", target, kd.k_d,
                          kd.k_d_lo, kd.k_d_hi, kd.n_draws_used));
      if (!(kd.k_d > 0.0 && kd.k_d <= 1.0 + 1e-12)) {
        notes.push_back(fmt("K_D at beta %.1f outside (0, 1]", target));
        ok = false;
      }
    } catch (const DomainError& err) {
      notes.push_back(fmt("K_D at beta %.1f unavailable: %s", target, err.what()));
      ok = false;
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 9. Every command is deterministic: rerunning with the same configuration
//    and seed produces byte-identical outputs regardless of thread count.
bool check_cli_determinism(Shared&, Notes& notes) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "admkit-acceptance-cli";
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);
  std::string d = dir.string() + "/";

  auto spit = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto cli = [](std::vector<std::string> args) {
    std::vector<const char*> argv = {"admkit"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  };
  auto theta_block = [](const std::string& prefix) {
    Vector10 v = testutil::bench_theta().as_vector();
    std::string out;
    const auto& names = HyperParams::field_names();
    for (int i = 0; i < 10; ++i) {
      out += prefix + names[i] + " = " + format_double(v[i]) + "\n";
    }
    return out;
  };

  // Run one command twice with different thread counts and compare the bytes
  // of every file it writes.
  auto reproducible = [&](const std::string& label, const std::vector<std::string>& args,
                          const std::vector<fs::path>& outputs) {
    if (cli(args) != 0) {
      notes.push_back(label + ": first run failed");
      return false;
    }
    std::vector<std::string> first;
    for (const fs::path& p : outputs) first.push_back(slurp(p));
    std::vector<std::string> rerun_args = args;
    rerun_args.push_back("--threads");
    rerun_args.push_back("4");
    if (cli(rerun_args) != 0) {
      notes.push_back(label + ": rerun failed");
      return false;
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (slurp(outputs[i]) != first[i]) {
        notes.push_back(label + ": " + outputs[i].filename().string() + " changed across runs");
        return false;
      }
    }
    return true;
  };

  spit(dir / "sim.cfg", "seed = 41\n" + theta_block("theta.") +
                            "dataset.1.n_boards = 80\n"
                            "dataset.1.tau_c = 4500\n"
                            "dataset.1.censor_hours = 8760\n"
                            "simulate.output_prefix = " + d + "data\n");
  spit(dir / "fit.cfg", "seed = 42\n"
                        "fit.datasets = " + d + "data1.csv\n"
                        "fit.burn_in = 4\n"
                        "fit.thin = 2\n"
                        "fit.n_draws = 5\n"
                        "fit.delta = 8\n"
                        "fit.pilot_replicates = 40\n"
                        "fit.output = " + d + "chain.jsonl\n" +
                            theta_block("fit.start."));
  spit(dir / "orc.cfg", "seed = 43\n"
                        "oracle.datasets = " + d + "data1.csv\n"
                        "oracle.chain = " + d + "chain.jsonl\n"
                        "oracle.draw_limit = 2\n"
                        "oracle.n_sim = 2000\n"
                        "oracle.output = " + d + "scores.csv\n" +
                            theta_block("theta."));
  spit(dir / "rel.cfg", "seed = 44\n" + theta_block("theta.") +
                            "reliability.n_rep = 16\n"
                            "reliability.horizon_years = 2\n"
                            "reliability.phi_grid = 1.0, 2.0, 4.0\n"
                            "reliability.curve_output = " + d + "curve.csv\n"
                            "reliability.path_output = " + d + "path.csv\n"
                            "reliability.failure_times_output = " + d + "times.csv\n");

  bool ok = reproducible("simulate", {"simulate", "--config", (dir / "sim.cfg").string()},
                         {dir / "data1.csv", dir / "data1.json"}) &&
            reproducible("fit", {"fit", "--config", (dir / "fit.cfg").string()},
                         {dir / "chain.jsonl"}) &&
            reproducible("oracle", {"oracle", "--config", (dir / "orc.cfg").string()},
                         {dir / "scores.csv"}) &&
            reproducible("reliability", {"reliability", "--config", (dir / "rel.cfg").string()},
                         {dir / "curve.csv", dir / "path.csv", dir / "times.csv"});
  if (ok) notes.push_back("simulate, fit, oracle and reliability outputs are byte-identical");
  fs::remove_all(dir, ec);
  return ok;
}

// ---------------------------------------------------------------------------
// 10. The reliability index is exactly zero at one half and round trips
//     through the normal CDF to 1e-10 across [-6, 6].
bool check_index_round_trip(Shared&, Notes& notes) {
  double at_half = reliability_index(0.5);
  if (at_half != 0.0 || std::signbit(at_half)) {
    notes.push_back(fmt("reliability_index(0.5) = %g, expected +0 exactly", at_half));
    return false;
  }
  // Phi(-beta) is evaluated in long double: rounding it to double near 1
  // destroys the tail (one ulp of p spans ~1e-8 of beta at beta = -6), and
  // every probability the reliability pipeline produces is an exact count
  // ratio, which widens to long double without loss.
  double worst = 0.0;
  for (int i = 0; i <= 12000; ++i) {
    double beta = -6.0 + static_cast<double>(i) * 0.001;
    long double p = 0.5L * std::erfc(static_cast<long double>(beta) *
                                     0.707106781186547524400844362104849L);
    double back = reliability_index(p);
    worst = std::max(worst, std::fabs(back - beta));
  }
  notes.push_back(fmt("worst absolute round-trip error %.3e on [-6, 6] (tolerance 1e-10)", worst));
  return worst <= 1e-10;
}

}  // namespace

int main() {
  g_threads = resolve_threads(0);
  std::printf("acceptance suite: %d worker threads\n", g_threads);
  std::fflush(stdout);

  struct Entry {
    const char* name;
    bool (*fn)(Shared&, Notes&);
  };
  const Entry entries[] = {
      {"analytic failure times match the Adams-Bashforth integrator", check_analytic_vs_ode},
      {"equal-exponent ramp closed form matches the root solver", check_equal_exponent},
      {"lower incomplete gamma matches adaptive quadrature", check_gamma_grid},
      {"single-test chain concentrates near the true log likelihood", check_scenario1},
      {"second dataset tightens the log-likelihood range", check_scenario2},
      {"acceptance ratio reproduces the hand-computed example", check_accept_ratio},
      {"load-process long-run moments match their targets", check_load_moments},
      {"reliability curves are ordered and K_D lies in (0, 1]", check_reliability_orderings},
      {"commands are byte-identical across reruns and thread counts", check_cli_determinism},
      {"reliability index round trips through the normal CDF", check_index_round_trip},
  };
  const int n_checks = static_cast<int>(sizeof(entries) / sizeof(entries[0]));

  Shared sh;
  int failures = 0;
  for (int i = 0; i < n_checks; ++i) {
    Notes notes;
    bool ok = false;
    auto begin = std::chrono::steady_clock::now();
    try {
      ok = entries[i].fn(sh, notes);
    } catch (const std::exception& err) {
      notes.push_back(fmt("unhandled exception: %s", err.what()));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    std::printf("[%s] %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", i + 1, entries[i].name, secs);
    for (const std::string& n : notes) std::printf("    - %s\n", n.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  std::printf("%d of %d acceptance checks passed\n", n_checks - failures, n_checks);
  return failures;
}
