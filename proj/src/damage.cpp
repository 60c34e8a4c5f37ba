#include "admkit/damage.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "admkit/special.hpp"

namespace admkit {

namespace {

constexpr double kBracketLo = 1e-12;
constexpr double kBracketHi = 1e12;
constexpr double kExpClamp = 690.0;  // keeps exp() below ~5e299

double clamped_exp(double x) { return std::exp(std::min(x, kExpClamp)); }

void check_effects(const RandomEffects& fx, const char* op) {
  if (!fx.valid()) {
    throw DomainError(std::string(op) +
                      ": random effects must satisfy a,b,c,n > 0 and sigma0 in (0,1)");
  }
}

void check_rate(double k, const char* op) {
  if (!(k > 0) || !std::isfinite(k)) {
    throw DomainError(std::string(op) + ": ramp rate k must be positive and finite");
  }
}

std::string describe(const RandomEffects& fx) {
  return "a=" + std::to_string(fx.a) + " b=" + std::to_string(fx.b) +
         " c=" + std::to_string(fx.c) + " n=" + std::to_string(fx.n) +
         " sigma0=" + std::to_string(fx.sigma0);
}

// log form of the ramp failure condition at time t; negative before the
// failure time and positive after.  The additive final term is the damage
// integral itself, so the clamp only ever affects points far past the root.
double ramp_condition(const RandomEffects& fx, double k, double t) {
  double s = (fx.b + 1.0) / (fx.n + 1.0);
  double lt = std::log(t);
  double log_ak = std::log(fx.a) + std::log(k);
  double log_ck = std::log(fx.c) + std::log(k);
  double log_i = fx.n * (log_ck + lt) + lt - std::log(fx.n + 1.0) +
                 (fx.n + 1.0) * std::log1p(-fx.sigma0) - std::log(kMuHours);
  double log_pref = fx.b * (log_ak + lt) - fx.n * s * (log_ck + lt) +
                    ((fx.b - fx.n) / (fx.n + 1.0)) *
                        (std::log(kMuHours * (fx.n + 1.0)) - lt);
  return log_pref + log_lower_incomplete_gamma_from_log(s, log_i) + clamped_exp(log_i);
}

// Brent's method on [lo, hi] with f(lo) < 0 < f(hi); tolerance relative to
// the current iterate.
template <typename F>
double brent(F f, double lo, double hi, double flo, double fhi, double rel_tol) {
  double a = lo, b = hi, c = hi;
  double fa = flo, fb = fhi, fc = fhi;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0 && fc > 0) || (fb < 0 && fc < 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 2.220446049250313e-16 * std::fabs(b) + 0.5 * rel_tol * std::fabs(b);
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::fabs(d) > tol1) {
      b += d;
    } else {
      b += xm > 0 ? tol1 : -tol1;
    }
    fb = f(b);
  }
  return b;
}

}  // namespace

double damage_rate(double alpha, double tau, double tau_s, const RandomEffects& fx) {
  check_effects(fx, "damage_rate");
  if (!(alpha >= 0) || !std::isfinite(alpha)) {
    throw DomainError("damage_rate: alpha must be nonnegative and finite");
  }
  if (!(tau_s > 0) || !std::isfinite(tau_s)) {
    throw DomainError("damage_rate: tau_s must be positive and finite");
  }
  if (std::isnan(tau)) throw DomainError("damage_rate: tau must not be NaN");
  SegmentCoeffs co = segment_coeffs(tau, tau_s, fx);
  double rate = clamped_exp(co.log_a);
  if (alpha > 0 && co.log_b > -kInf) rate += clamped_exp(co.log_b + std::log(alpha));
  return rate;
}

SegmentCoeffs segment_coeffs(double tau, double tau_s, const RandomEffects& fx) {
  double x = tau / tau_s - fx.sigma0;
  if (!(x > 0)) return {};
  double lx = std::log(x);
  double lts = std::log(tau_s);
  double log_mu = std::log(kMuHours);
  return {fx.b * (std::log(fx.a) + lts + lx) - log_mu,
          fx.n * (std::log(fx.c) + lts + lx) - log_mu};
}

RampSolve solve_ramp_failure(const RandomEffects& fx, double k) {
  check_effects(fx, "solve_ramp_failure");
  check_rate(k, "solve_ramp_failure");
  auto f = [&](double t) { return ramp_condition(fx, k, t); };
  double t = 1.0;
  double ft = f(t);
  if (ft == 0) return {RampStatus::Root, t};
  double lo, hi, flo, fhi;
  if (ft > 0) {
    hi = t;
    fhi = ft;
    lo = t / 2;
    flo = f(lo);
    while (flo > 0) {
      hi = lo;
      fhi = flo;
      lo /= 2;
      if (lo < kBracketLo) return {RampStatus::FailureBelowMin, lo};
      flo = f(lo);
    }
  } else {
    lo = t;
    flo = ft;
    hi = t * 2;
    fhi = f(hi);
    while (fhi < 0) {
      lo = hi;
      flo = fhi;
      hi *= 2;
      if (hi > kBracketHi) return {RampStatus::NoFailureBelowMax, hi};
      fhi = f(hi);
    }
  }
  if (flo == 0) return {RampStatus::Root, lo};
  if (fhi == 0) return {RampStatus::Root, hi};
  return {RampStatus::Root, brent(f, lo, hi, flo, fhi, 1e-10)};
}

double ramp_failure_time(const RandomEffects& fx, double k) {
  RampSolve rs = solve_ramp_failure(fx, k);
  switch (rs.status) {
    case RampStatus::Root:
      return rs.time;
    case RampStatus::NoFailureBelowMax:
      throw SolverError("ramp_failure_time: no failure within 1e12 hours for " + describe(fx) +
                        " k=" + std::to_string(k));
    default:
      throw SolverError("ramp_failure_time: damage already complete at 1e-12 hours for " +
                        describe(fx) + " k=" + std::to_string(k));
  }
}

double constant_segment_failure_delta(double alpha0, double log_a, double log_b) {
  if (alpha0 >= 1.0) return 0.0;
  if (!(alpha0 >= 0)) throw DomainError("constant_segment_failure_delta: alpha0 must be in [0, 1)");
  bool no_a = log_a == -kInf;
  bool no_b = log_b == -kInf;
  if (no_a && no_b) return kInf;
  if (no_a) {
    if (alpha0 == 0.0) return kInf;
    return -std::log(alpha0) * std::exp(-log_b);
  }
  if (no_b) return (1.0 - alpha0) * std::exp(-log_a);
  double log_q = log_a - log_b;
  if (log_q > 300.0) return (1.0 - alpha0) * std::exp(-log_a);
  if (alpha0 == 0.0 && log_q < -700.0) return (log_b - log_a) * std::exp(-log_b);
  double q = std::exp(log_q);
  double b = std::exp(std::min(log_b, kExpClamp));
  return std::log1p((1.0 - alpha0) / (alpha0 + q)) / b;
}

double advance_constant_segment(double alpha0, double log_a, double log_b, double dt) {
  if (dt <= 0 || alpha0 >= 1.0) return alpha0;
  if (!(alpha0 >= 0)) throw DomainError("advance_constant_segment: alpha0 must be in [0, 1)");
  bool no_a = log_a == -kInf;
  bool no_b = log_b == -kInf;
  if (no_a && no_b) return alpha0;
  if (no_b) return alpha0 + std::exp(log_a) * dt;
  double b = std::exp(std::min(log_b, kExpClamp));
  if (no_a) return alpha0 * std::exp(std::min(b * dt, kExpClamp));
  double log_q = log_a - log_b;
  if (log_q > 300.0) return alpha0 + std::exp(log_a) * dt;
  double q = std::exp(log_q);
  if (alpha0 + q == 0.0) return std::exp(log_a + std::log(dt));
  double g = b * dt;
  if (g > 700.0) return alpha0 + std::exp(std::log(alpha0 + q) + std::min(g, 1400.0));
  return alpha0 + (alpha0 + q) * std::expm1(g);
}

DamageSolution constant_load_failure_time(const RandomEffects& fx, double k, double tau_c) {
  check_effects(fx, "constant_load_failure_time");
  check_rate(k, "constant_load_failure_time");
  if (!(tau_c > 0)) throw DomainError("constant_load_failure_time: tau_c must be positive");

  RampSolve rs = solve_ramp_failure(fx, k);
  if (rs.status == RampStatus::FailureBelowMin) {
    return {kBracketLo, FailurePhase::Ramp, 1.0, 1.0};
  }
  if (rs.status == RampStatus::NoFailureBelowMax) {
    // The capped profile never exceeds the pure ramp, which itself causes no
    // failure within 1e12 hours; treat as indefinite survival.
    return {kInf, FailurePhase::Survived, 0.0, 0.0};
  }
  double t_s = rs.time;
  if (std::isinf(tau_c) || t_s <= tau_c / k) {
    return {t_s, FailurePhase::Ramp, 1.0, 1.0};
  }

  double t0 = tau_c / k;
  double ratio0 = t0 / t_s;  // equals tau_c / tau_s
  if (ratio0 <= fx.sigma0) {
    // Stress never exceeds the damage threshold anywhere in this profile.
    return {kInf, FailurePhase::Survived, 0.0, 0.0};
  }

  double s = (fx.b + 1.0) / (fx.n + 1.0);
  double x0 = ratio0 - fx.sigma0;
  double lx0 = std::log(x0);
  double log_ats = std::log(fx.a) + std::log(k) + std::log(t_s);  // log(a tau_s)
  double log_cts = std::log(fx.c) + std::log(k) + std::log(t_s);
  double log_mu = std::log(kMuHours);
  double log_c1 = fx.b * (log_ats + lx0) - log_mu;
  double log_c2 = fx.n * (log_cts + lx0) - log_mu;
  double log_i0 = fx.n * log_cts + std::log(t_s) - std::log(fx.n + 1.0) +
                  (fx.n + 1.0) * lx0 - log_mu;
  if (log_i0 > 600.0) {
    throw NumericalError(
        "constant_load_failure_time: ramp-end damage integral not representable (log I0 = " +
        std::to_string(log_i0) + ") for " + describe(fx));
  }
  double i0 = std::exp(log_i0);
  double log_pref = fx.b * log_ats - fx.n * s * log_cts +
                    ((fx.b - fx.n) / (fx.n + 1.0)) *
                        std::log(kMuHours * (fx.n + 1.0) / t_s);
  double log_alpha0 = i0 + log_pref + log_lower_incomplete_gamma_from_log(s, log_i0);
  if (std::isnan(log_alpha0)) {
    throw NumericalError("constant_load_failure_time: ramp-end damage is indeterminate for " +
                         describe(fx));
  }
  double alpha0 = std::exp(std::min(log_alpha0, 0.0));
  double delta = alpha0 >= 1.0 ? 0.0 : constant_segment_failure_delta(alpha0, log_c1, log_c2);
  if (std::isinf(delta)) {
    // Hold-phase failure lies beyond the representable range.
    return {kInf, FailurePhase::Survived, alpha0, alpha0};
  }
  double t_fail = t0 + delta;
  if (std::isnan(t_fail) || t_fail < t0) {
    throw NumericalError("constant_load_failure_time: degenerate hold-phase solution for " +
                         describe(fx));
  }
  FailurePhase phase = t_fail <= t0 ? FailurePhase::Ramp : FailurePhase::Constant;
  return {t_fail, phase, alpha0, 1.0};
}

DamageSolution propagate_piecewise(const RandomEffects& fx, double tau_s,
                                   const PiecewiseProfile& profile, double t_max) {
  check_effects(fx, "propagate_piecewise");
  if (!(tau_s > 0) || !std::isfinite(tau_s)) {
    throw DomainError("propagate_piecewise: tau_s must be positive and finite");
  }
  if (!profile.valid()) throw DomainError("propagate_piecewise: malformed piecewise profile");
  if (!(t_max >= 0)) throw DomainError("propagate_piecewise: t_max must be nonnegative");

  double alpha = 0.0;
  std::size_t m = profile.levels.size();
  for (std::size_t i = 0; i < m; ++i) {
    double seg_start = profile.breakpoints[i];
    if (seg_start >= t_max) break;
    double seg_end = i + 1 < m ? std::min(profile.breakpoints[i + 1], t_max) : t_max;
    double len = seg_end - seg_start;
    if (len <= 0) continue;
    SegmentCoeffs co = segment_coeffs(profile.levels[i], tau_s, fx);
    double delta = constant_segment_failure_delta(alpha, co.log_a, co.log_b);
    if (delta <= len) {
      return {seg_start + delta, FailurePhase::Constant, 0.0, 1.0};
    }
    alpha = advance_constant_segment(alpha, co.log_a, co.log_b, len);
    if (alpha >= 1.0) {
      return {seg_end, FailurePhase::Constant, 0.0, 1.0};
    }
  }
  return {kInf, FailurePhase::Survived, 0.0, alpha};
}

namespace {

struct Segment {
  double start = 0;
  double end = 0;
  double level = 0;   // constant stress unless ramp
  bool ramp = false;  // stress is k * t on this segment
  double k = 0;
};

std::vector<Segment> build_segments(const LoadProfile& profile, double t0, double t_max) {
  std::vector<Segment> segs;
  if (const auto* rc = std::get_if<RampConstantProfile>(&profile)) {
    double ramp_end = rc->ramp_end();
    if (t0 < ramp_end) {
      segs.push_back({t0, std::min(ramp_end, t_max), 0.0, true, rc->k});
    }
    if (std::isfinite(ramp_end) && t_max > ramp_end) {
      segs.push_back({std::max(t0, ramp_end), t_max, rc->tau_c, false, rc->k});
    }
  } else {
    const auto& pw = std::get<PiecewiseProfile>(profile);
    std::size_t m = pw.levels.size();
    for (std::size_t i = 0; i < m; ++i) {
      double s = std::max(pw.breakpoints[i], t0);
      double e = i + 1 < m ? std::min(pw.breakpoints[i + 1], t_max) : t_max;
      if (e > s) segs.push_back({s, e, pw.levels[i], false, 0.0});
    }
  }
  return segs;
}

}  // namespace

DamageSolution integrate_damage(const RandomEffects& fx, double tau_s,
                                const LoadProfile& profile, double t_max, double step,
                                double alpha0, double t0) {
  check_effects(fx, "integrate_damage");
  if (!(tau_s > 0) || !std::isfinite(tau_s)) {
    throw IntegrationError("integrate_damage: tau_s must be positive and finite");
  }
  if (!(step > 0) || !std::isfinite(step)) {
    throw IntegrationError("integrate_damage: step must be positive and finite");
  }
  if (!std::isfinite(t_max) || !(t_max >= t0) || !(t0 >= 0)) {
    throw IntegrationError("integrate_damage: need 0 <= t0 <= t_max < inf");
  }
  if (!(alpha0 >= 0) || !std::isfinite(alpha0)) {
    throw IntegrationError("integrate_damage: alpha0 must be nonnegative and finite");
  }
  if (const auto* pw = std::get_if<PiecewiseProfile>(&profile)) {
    if (!pw->valid()) throw IntegrationError("integrate_damage: malformed piecewise profile");
  }

  const auto* rc = std::get_if<RampConstantProfile>(&profile);
  double ramp_end = rc ? rc->ramp_end() : 0.0;
  bool has_ramp_end = rc && std::isfinite(ramp_end);
  double alpha_ramp_end = rc && t0 >= ramp_end ? alpha0 : 1.0;
  bool ramp_end_seen = rc && t0 >= ramp_end;

  auto alpha_t0_on_failure = [&] {
    if (!rc) return 0.0;
    return ramp_end_seen ? std::min(alpha_ramp_end, 1.0) : 1.0;
  };

  double alpha = alpha0;
  if (alpha >= 1.0) {
    return {t0, rc && t0 <= ramp_end ? FailurePhase::Ramp : FailurePhase::Constant,
            alpha_t0_on_failure(), 1.0};
  }

  auto result_phase = [&](double t_fail) {
    if (rc) return t_fail <= ramp_end ? FailurePhase::Ramp : FailurePhase::Constant;
    return FailurePhase::Constant;
  };

  for (const Segment& seg : build_segments(profile, t0, t_max)) {
    double len = seg.end - seg.start;
    double n_real = std::ceil(len / step);
    if (n_real > 5e9) throw IntegrationError("integrate_damage: step too small for segment length");
    long n_steps = std::max(1L, static_cast<long>(n_real));
    double h = len / static_cast<double>(n_steps);

    SegmentCoeffs fixed;
    if (!seg.ramp) fixed = segment_coeffs(seg.level, tau_s, fx);
    auto rate = [&](double t, double a) {
      SegmentCoeffs co = seg.ramp ? segment_coeffs(seg.k * t, tau_s, fx) : fixed;
      double r = clamped_exp(co.log_a);
      if (a > 0 && co.log_b > -kInf) r += clamped_exp(co.log_b) * a;
      return r;
    };

    double hist[5] = {0, 0, 0, 0, 0};
    for (long i = 0; i < n_steps; ++i) {
      double t_i = seg.start + h * static_cast<double>(i);
      double alpha_new;
      double f_i;
      if (i < 4) {
        double k1 = rate(t_i, alpha);
        double k2 = rate(t_i + 0.5 * h, alpha + 0.5 * h * k1);
        double k3 = rate(t_i + 0.5 * h, alpha + 0.5 * h * k2);
        double k4 = rate(t_i + h, alpha + h * k3);
        alpha_new = alpha + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        f_i = k1;
      } else {
        f_i = rate(t_i, alpha);
        alpha_new = alpha + h / 720.0 *
                                (1901.0 * f_i - 2774.0 * hist[0] + 2616.0 * hist[1] -
                                 1274.0 * hist[2] + 251.0 * hist[3]);
      }
      if (!std::isfinite(alpha_new)) {
        throw IntegrationError("integrate_damage: state became non-finite at t = " +
                               std::to_string(t_i));
      }
      hist[4] = hist[3]; hist[3] = hist[2]; hist[2] = hist[1]; hist[1] = hist[0];
      hist[0] = f_i;
      if (alpha_new >= 1.0) {
        double frac = alpha_new > alpha ? (1.0 - alpha) / (alpha_new - alpha) : 1.0;
        double t_fail = t_i + h * frac;
        return {t_fail, result_phase(t_fail), alpha_t0_on_failure(), 1.0};
      }
      alpha = alpha_new;
    }
    if (rc && !ramp_end_seen && seg.ramp && has_ramp_end && seg.end >= ramp_end) {
      alpha_ramp_end = alpha;
      ramp_end_seen = true;
    }
  }
  double alpha_t0_field = ramp_end_seen ? alpha_ramp_end : (rc ? alpha : 0.0);
  return {kInf, FailurePhase::Survived, alpha_t0_field, alpha};
}

}  // namespace admkit
