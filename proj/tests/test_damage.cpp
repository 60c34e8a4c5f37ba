#include <doctest.h>

#include <cmath>
#include <vector>

#include "admkit/damage.hpp"
#include "admkit/rng.hpp"
#include "oracles.hpp"

using namespace admkit;

namespace {

// Directly evaluated damage rate for magnitudes where naive pow() is safe.
double naive_rate(double alpha, double tau, double tau_s, const RandomEffects& fx) {
  double x = tau / tau_s - fx.sigma0;
  if (x <= 0) return 0.0;
  return (std::pow(fx.a * tau_s * x, fx.b) + std::pow(fx.c * tau_s * x, fx.n) * alpha) / kMuHours;
}

}  // namespace

TEST_CASE("damage rate matches the direct formula at benign magnitudes") {
  RandomEffects fx{0.1, 2.0, 0.2, 1.5, 0.3};
  double tau_s = 2.0;
  for (double alpha : {0.0, 0.2, 0.9}) {
    for (double tau : {0.1, 0.59, 0.61, 1.0, 1.6, 2.0}) {
      CHECK(damage_rate(alpha, tau, tau_s, fx) ==
            doctest::Approx(naive_rate(alpha, tau, tau_s, fx)).epsilon(1e-13));
    }
  }
  // Exactly zero at and below the threshold.
  CHECK(damage_rate(0.5, tau_s * fx.sigma0, tau_s, fx) == 0.0);
  CHECK(damage_rate(0.5, 0.0, tau_s, fx) == 0.0);
}

TEST_CASE("damage rate is finite and nonnegative under extreme draws") {
  Rng rng(substream(0x11d5u, "rate-prop"));
  for (int i = 0; i < 2000; ++i) {
    RandomEffects fx{rng.lognormal(-7.5, 3.0), rng.lognormal(3.2, 1.0),
                     rng.lognormal(-22.0, 4.0), rng.lognormal(-1.0, 1.0),
                     1.0 / (1.0 + std::exp(-rng.normal(0.15, 1.0)))};
    double tau_s = rng.lognormal(8.8, 0.6);
    double rate = damage_rate(rng.uniform(), tau_s * (fx.sigma0 + 2.0 * rng.uniform()), tau_s, fx);
    CHECK(std::isfinite(rate));
    CHECK(rate >= 0.0);
  }
}

TEST_CASE("ramp failure time matches the ODE integration") {
  RandomEffects fx = testutil::bench_effects();
  double T = ramp_failure_time(fx, kStandardRampRate);
  CHECK(T > 0.0);
  double tau_s = kStandardRampRate * T;
  // Strength in a plausible psi range for the benchmark population.
  CHECK(tau_s > 2000.0);
  CHECK(tau_s < 20000.0);

  DamageSolution ode = integrate_damage(fx, tau_s, RampConstantProfile{kStandardRampRate, kInf},
                                        1.5 * T, T / 20000.0);
  REQUIRE(ode.failed());
  CHECK(ode.phase == FailurePhase::Ramp);
  CHECK(std::fabs(ode.failure_time - T) <= 1e-4 * T);
}

TEST_CASE("ramp solve consistency: strength equals rate times failure time") {
  RandomEffects fx = testutil::bench_effects();
  for (double k : {1000.0, kStandardRampRate, 5e6}) {
    RampSolve rs = solve_ramp_failure(fx, k);
    REQUIRE(rs.status == RampStatus::Root);
    // Slower ramps give longer times but lower strengths.
    CHECK(rs.time > 0.0);
  }
  double t_slow = ramp_failure_time(fx, 1000.0);
  double t_std = ramp_failure_time(fx, kStandardRampRate);
  CHECK(t_slow > t_std);
  CHECK(1000.0 * t_slow < kStandardRampRate * t_std);
}

TEST_CASE("ramp failure time equals the closed form when b == n") {
  Rng rng(substream(0x11d5u, "equal-bn"));
  for (int i = 0; i < 40; ++i) {
    RandomEffects fx;
    fx.a = std::exp(-9.0 + 6.0 * rng.uniform());
    fx.c = std::exp(-25.0 + 6.0 * rng.uniform());
    fx.n = std::exp(-1.5 + 2.5 * rng.uniform());
    fx.b = fx.n;
    fx.sigma0 = 0.25 + 0.5 * rng.uniform();
    double k = kStandardRampRate;
    double want = testutil::equal_exponent_ramp_time(fx, k);
    if (!(want > 1e-12 && want < 1e12)) continue;
    double got = ramp_failure_time(fx, k);
    CHECK(std::fabs(got - want) <= 1e-8 * want);
  }
}

TEST_CASE("near-equal exponents approach the equal-exponent closed form") {
  RandomEffects fx = testutil::bench_effects();
  fx.b = 2.0;
  fx.n = 2.0;
  double exact = testutil::equal_exponent_ramp_time(fx, kStandardRampRate);
  double got = ramp_failure_time(fx, kStandardRampRate);
  CHECK(got == doctest::Approx(exact).epsilon(1e-8));
  fx.n = 2.0 * (1.0 + 1e-9);
  CHECK(ramp_failure_time(fx, kStandardRampRate) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("constant-load closed form matches a two-phase ODE integration") {
  Rng rng(substream(0x11d5u, "hold-ode"));
  int compared = 0;
  for (int i = 0; i < 12; ++i) {
    RandomEffects fx = sample_effects(testutil::bench_theta(), rng);
    double tau_c = 4500.0;
    DamageSolution sol = constant_load_failure_time(fx, kStandardRampRate, tau_c);
    if (sol.phase != FailurePhase::Constant) continue;
    double t0 = tau_c / kStandardRampRate;
    // Integrate the ramp finely, then the hold phase.
    RampConstantProfile prof{kStandardRampRate, tau_c};
    double tau_s = kStandardRampRate * ramp_failure_time(fx, kStandardRampRate);
    DamageSolution ramp_part = integrate_damage(fx, tau_s, prof, t0, t0 / 20000.0);
    REQUIRE(!ramp_part.failed());
    double span = sol.failure_time - t0;
    DamageSolution ode = integrate_damage(fx, tau_s, prof, sol.failure_time + 0.5 * span,
                                          span / 40000.0, ramp_part.alpha_final, t0);
    REQUIRE(ode.failed());
    CHECK(ode.phase == FailurePhase::Constant);
    CHECK(std::fabs(ode.failure_time - sol.failure_time) <= 1e-3 * sol.failure_time);
    CHECK(sol.alpha_at_t0 == doctest::Approx(ramp_part.alpha_final).epsilon(1e-3));
    ++compared;
  }
  CHECK(compared >= 3);
}

TEST_CASE("constant-load edge cases") {
  RandomEffects fx = testutil::bench_effects();
  double T_s = ramp_failure_time(fx, kStandardRampRate);
  double tau_s = kStandardRampRate * T_s;

  SUBCASE("hold level above the ramp strength fails on the ramp") {
    DamageSolution sol = constant_load_failure_time(fx, kStandardRampRate, 2.0 * tau_s);
    CHECK(sol.phase == FailurePhase::Ramp);
    CHECK(sol.failure_time == doctest::Approx(T_s).epsilon(1e-12));
    CHECK(sol.alpha_at_t0 == 1.0);
  }
  SUBCASE("hold level at or below the stress threshold never fails") {
    DamageSolution sol = constant_load_failure_time(fx, kStandardRampRate, 0.9 * fx.sigma0 * tau_s);
    CHECK(sol.phase == FailurePhase::Survived);
    CHECK(sol.failure_time == kInf);
    CHECK(sol.alpha_final < 1.0);
  }
  SUBCASE("failure time decreases as the hold level rises") {
    double prev = kInf;
    for (double frac : {0.55, 0.65, 0.75, 0.85, 0.95}) {
      DamageSolution sol = constant_load_failure_time(fx, kStandardRampRate, frac * tau_s);
      if (sol.phase == FailurePhase::Survived) continue;
      CHECK(sol.failure_time < prev);
      prev = sol.failure_time;
    }
    CHECK(std::isfinite(prev));
  }
  SUBCASE("damage at the end of the ramp grows with the hold level") {
    DamageSolution lo = constant_load_failure_time(fx, kStandardRampRate, 0.70 * tau_s);
    DamageSolution hi = constant_load_failure_time(fx, kStandardRampRate, 0.95 * tau_s);
    CHECK(lo.alpha_at_t0 < hi.alpha_at_t0);
    CHECK(lo.alpha_at_t0 > 0.0);
    CHECK(hi.alpha_at_t0 < 1.0);
  }
}

TEST_CASE("segment propagation agrees with the affine closed form") {
  // d(alpha)/dt = A + B*alpha with A = e^-2, B = e^-1:
  // alpha(t) = (alpha0 + A/B) e^(Bt) - A/B.
  double log_a = -2.0, log_b = -1.0;
  double A = std::exp(log_a), B = std::exp(log_b);
  double alpha0 = 0.125;
  for (double dt : {0.1, 1.0, 3.0}) {
    double want = (alpha0 + A / B) * std::exp(B * dt) - A / B;
    if (want >= 1.0) continue;
    CHECK(advance_constant_segment(alpha0, log_a, log_b, dt) ==
          doctest::Approx(want).epsilon(1e-13));
  }
  // First passage to 1: t* = log((1 + A/B) / (alpha0 + A/B)) / B.
  double want_t = std::log((1.0 + A / B) / (alpha0 + A / B)) / B;
  CHECK(constant_segment_failure_delta(alpha0, log_a, log_b) ==
        doctest::Approx(want_t).epsilon(1e-13));
  // Advancing by exactly t* lands at 1.
  CHECK(advance_constant_segment(alpha0, log_a, log_b, want_t) ==
        doctest::Approx(1.0).epsilon(1e-10));

  // Pure decay-free growth (B = 0): alpha(t) = alpha0 + A t.
  CHECK(advance_constant_segment(0.25, log_a, -kInf, 2.0) ==
        doctest::Approx(0.25 + 2.0 * A).epsilon(1e-14));
  CHECK(constant_segment_failure_delta(0.25, log_a, -kInf) ==
        doctest::Approx(0.75 / A).epsilon(1e-14));
  // No forcing at all: never fails.
  CHECK(constant_segment_failure_delta(0.25, -kInf, -kInf) == kInf);
  CHECK(advance_constant_segment(0.25, -kInf, -kInf, 5.0) == 0.25);
}

TEST_CASE("piecewise propagation matches numerical integration") {
  RandomEffects fx = testutil::bench_effects();
  double tau_s = kStandardRampRate * ramp_failure_time(fx, kStandardRampRate);
  PiecewiseProfile prof;
  prof.breakpoints = {0.0, 50.0, 200.0, 900.0, 1300.0};
  prof.levels = {0.70 * tau_s, 0.45 * tau_s, 0.82 * tau_s, 0.30 * tau_s, 0.88 * tau_s};

  DamageSolution exact = propagate_piecewise(fx, tau_s, prof, 5000.0);
  DamageSolution ode = integrate_damage(fx, tau_s, LoadProfile{prof}, 5000.0, 0.02);
  CHECK(exact.failed() == ode.failed());
  if (exact.failed()) {
    CHECK(std::fabs(exact.failure_time - ode.failure_time) <= 1e-5 * exact.failure_time);
    CHECK(exact.phase == ode.phase);
  } else {
    CHECK(exact.alpha_final == doctest::Approx(ode.alpha_final).epsilon(1e-5));
  }
  // No-ramp profiles report alpha_at_t0 = 0.
  CHECK(exact.alpha_at_t0 == 0.0);
}

TEST_CASE("piecewise propagation is monotone in the load path") {
  RandomEffects fx = testutil::bench_effects();
  double tau_s = kStandardRampRate * ramp_failure_time(fx, kStandardRampRate);
  Rng rng(substream(0x11d5u, "dominate"));
  for (int rep = 0; rep < 25; ++rep) {
    PiecewiseProfile lo, hi;
    double t = 0.0;
    lo.breakpoints.push_back(0.0);
    hi.breakpoints.push_back(0.0);
    for (int seg = 0; seg < 8; ++seg) {
      double level = tau_s * (0.3 + 0.6 * rng.uniform());
      lo.levels.push_back(level);
      hi.levels.push_back(level + tau_s * 0.1 * rng.uniform());
      if (seg > 0) {
        lo.breakpoints.push_back(t);
        hi.breakpoints.push_back(t);
      }
      t += 10.0 + 400.0 * rng.uniform();
    }
    DamageSolution slo = propagate_piecewise(fx, tau_s, lo, 4000.0);
    DamageSolution shi = propagate_piecewise(fx, tau_s, hi, 4000.0);
    // A pointwise-dominating path fails no later and accumulates no less.
    CHECK(shi.failure_time <= slo.failure_time);
    if (!slo.failed() && !shi.failed()) {
      CHECK(shi.alpha_final >= slo.alpha_final);
    }
  }
}

TEST_CASE("integrator halving the step changes the answer only slightly") {
  RandomEffects fx = testutil::bench_effects();
  double T = ramp_failure_time(fx, kStandardRampRate);
  double tau_s = kStandardRampRate * T;
  RampConstantProfile prof{kStandardRampRate, kInf};
  double coarse = integrate_damage(fx, tau_s, prof, 1.5 * T, T / 2000.0).failure_time;
  double fine = integrate_damage(fx, tau_s, prof, 1.5 * T, T / 4000.0).failure_time;
  CHECK(std::fabs(fine - T) <= std::fabs(coarse - T) + 1e-12 * T);
  CHECK(std::fabs(fine - T) <= 1e-5 * T);
}

TEST_CASE("integrator validates its inputs") {
  RandomEffects fx = testutil::bench_effects();
  CHECK_THROWS_AS(integrate_damage(fx, 7000.0, RampConstantProfile{}, 1.0, 0.0),
                  IntegrationError);
  CHECK_THROWS_AS(integrate_damage(fx, 7000.0, RampConstantProfile{}, -1.0, 0.1),
                  IntegrationError);
  PiecewiseProfile bad;
  bad.breakpoints = {1.0};
  bad.levels = {100.0};
  CHECK_THROWS_AS(integrate_damage(fx, 7000.0, LoadProfile{bad}, 1.0, 0.1), IntegrationError);
  // Requesting an absurd number of steps is rejected rather than looping.
  CHECK_THROWS_AS(integrate_damage(fx, 7000.0, RampConstantProfile{}, 1e12, 1e-6),
                  IntegrationError);
}

TEST_CASE("ramp solver reports out-of-bracket cases") {
  // Effectively indestructible board: no failure below the bracket ceiling.
  RandomEffects weak{1e-300, 5.0, 1e-300, 2.0, 0.999};
  CHECK(solve_ramp_failure(weak, kStandardRampRate).status == RampStatus::NoFailureBelowMax);
  CHECK_THROWS_AS(ramp_failure_time(weak, kStandardRampRate), SolverError);
  // Instantly failing board.
  RandomEffects strong{1e300, 5.0, 1e-10, 2.0, 1e-9};
  CHECK(solve_ramp_failure(strong, kStandardRampRate).status == RampStatus::FailureBelowMin);
}
