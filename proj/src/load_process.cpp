#include "admkit/load_process.hpp"

#include <algorithm>
#include <cmath>

namespace admkit {

void LoadModelParams::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0; };
  if (!pos(dead_mean) || !pos(dead_sd) || !pos(occupancy_mean_years) ||
      !pos(sustained_shape) || !pos(sustained_scale) || !pos(extra_gap_mean_years) ||
      !pos(extra_duration_mean_years) || !pos(extra_shape) || !pos(extra_scale) ||
      !pos(dead_to_live_ratio) || !pos(dead_factor) || !pos(live_factor) ||
      !pos(characteristic_strength)) {
    throw DomainError("LoadModelParams: all parameters must be positive and finite");
  }
}

LoadPath sample_load_path(const LoadModelParams& params, double horizon_hours, Rng& rng) {
  params.validate();
  if (!(horizon_hours > 0) || !std::isfinite(horizon_hours)) {
    throw DomainError("sample_load_path: horizon_hours must be positive and finite");
  }
  LoadPath path;
  path.horizon_hours = horizon_hours;

  do {
    path.dead = rng.normal(params.dead_mean, params.dead_sd);
  } while (path.dead <= 0);

  // Sustained component: a fresh occupancy starts at 0; each period draws its
  // level, then its duration.
  path.sustained.breakpoints.push_back(0.0);
  double t = 0.0;
  for (;;) {
    path.sustained.levels.push_back(rng.gamma(params.sustained_shape, params.sustained_scale));
    t += rng.exponential(params.occupancy_mean_years * kHoursPerYear);
    if (t >= horizon_hours) break;
    path.sustained.breakpoints.push_back(t);
  }

  // Extraordinary component: alternating zero-level gaps and positive
  // episodes, starting in a gap.
  path.extraordinary.breakpoints.push_back(0.0);
  path.extraordinary.levels.push_back(0.0);
  t = 0.0;
  for (;;) {
    t += rng.exponential(params.extra_gap_mean_years * kHoursPerYear);
    if (t >= horizon_hours) break;
    path.extraordinary.breakpoints.push_back(t);
    path.extraordinary.levels.push_back(rng.gamma(params.extra_shape, params.extra_scale));
    t += rng.exponential(params.extra_duration_mean_years * kHoursPerYear);
    if (t >= horizon_hours) break;
    path.extraordinary.breakpoints.push_back(t);
    path.extraordinary.levels.push_back(0.0);
  }
  return path;
}

double design_live_load(double phi, const LoadModelParams& params) {
  params.validate();
  if (!(phi > 0) || !std::isfinite(phi)) {
    throw DomainError("design_live_load: phi must be positive and finite");
  }
  return phi * params.characteristic_strength / params.design_denominator();
}

namespace {

// Walks two step processes in lockstep, emitting merged segments.
template <typename Fn>
void merge_steps(const StepProcess& s1, const StepProcess& s2, double horizon, Fn&& emit) {
  std::size_t i = 0, j = 0;
  double t = 0.0;
  while (t < horizon) {
    double next1 = i + 1 < s1.breakpoints.size() ? s1.breakpoints[i + 1] : horizon;
    double next2 = j + 1 < s2.breakpoints.size() ? s2.breakpoints[j + 1] : horizon;
    double next = std::min({next1, next2, horizon});
    emit(t, next, s1.levels[i], s2.levels[j]);
    if (next >= horizon) break;
    if (next1 == next) ++i;
    if (next2 == next) ++j;
    t = next;
  }
}

void check_path(const LoadPath& path) {
  if (path.sustained.levels.empty() || path.extraordinary.levels.empty() ||
      path.sustained.breakpoints.size() != path.sustained.levels.size() ||
      path.extraordinary.breakpoints.size() != path.extraordinary.levels.size() ||
      !(path.dead > 0) || !(path.horizon_hours > 0)) {
    throw DomainError("load path is malformed");
  }
}

}  // namespace

PiecewiseProfile assemble_load(const LoadPath& path, double phi, const LoadModelParams& params) {
  check_path(path);
  double unit = design_live_load(phi, params);
  double gamma_d = params.dead_to_live_ratio * path.dead;
  PiecewiseProfile profile;
  merge_steps(path.sustained, path.extraordinary, path.horizon_hours,
              [&](double start, double, double lv_s, double lv_e) {
                profile.breakpoints.push_back(start);
                profile.levels.push_back(unit * (gamma_d + lv_s + lv_e));
              });
  return profile;
}

double max_combined_ratio(const LoadPath& path, const LoadModelParams& params) {
  check_path(path);
  double gamma_d = params.dead_to_live_ratio * path.dead;
  double best = 0.0;
  merge_steps(path.sustained, path.extraordinary, path.horizon_hours,
              [&](double, double, double lv_s, double lv_e) {
                best = std::max(best, gamma_d + lv_s + lv_e);
              });
  return best;
}

double time_average(const StepProcess& process, double horizon_hours) {
  if (process.levels.empty() || !(horizon_hours > 0)) {
    throw DomainError("time_average: malformed step process");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < process.levels.size(); ++i) {
    double start = process.breakpoints[i];
    double end = i + 1 < process.breakpoints.size()
                     ? std::min(process.breakpoints[i + 1], horizon_hours)
                     : horizon_hours;
    if (end > start) acc += process.levels[i] * (end - start);
  }
  return acc / horizon_hours;
}

double time_fraction_positive(const StepProcess& process, double horizon_hours) {
  if (process.levels.empty() || !(horizon_hours > 0)) {
    throw DomainError("time_fraction_positive: malformed step process");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < process.levels.size(); ++i) {
    double start = process.breakpoints[i];
    double end = i + 1 < process.breakpoints.size()
                     ? std::min(process.breakpoints[i + 1], horizon_hours)
                     : horizon_hours;
    if (end > start && process.levels[i] > 0) acc += end - start;
  }
  return acc / horizon_hours;
}

}  // namespace admkit
