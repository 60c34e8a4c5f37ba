#pragma once

#include "admkit/rng.hpp"
#include "admkit/types.hpp"

namespace admkit {

// Residential load model: a dead load drawn once per dwelling, a sustained
// live component resampled at occupancy changes, and sparse extraordinary
// episodes.  Durations are exponential with the given means; levels are
// gamma.  All values are in dimensionless load-ratio units until combined.
struct LoadModelParams {
  double dead_mean = 1.0;
  double dead_sd = 0.1;
  double occupancy_mean_years = 0.1;
  double sustained_shape = 3.122;
  double sustained_scale = 0.0481;
  double extra_gap_mean_years = 1.0;
  double extra_duration_mean_years = 0.03835;
  double extra_shape = 0.826;
  double extra_scale = 0.1023;

  double dead_to_live_ratio = 0.25;          // gamma in the design equation
  double dead_factor = 1.25;                 // alpha_d
  double live_factor = 1.5;                  // alpha_l
  double characteristic_strength = 2722.0;   // R_o, psi

  double design_denominator() const {
    return dead_to_live_ratio * dead_factor + live_factor;
  }

  void validate() const;
};

// Right-continuous step function: levels[i] on [breakpoints[i],
// breakpoints[i+1]), the last level extending indefinitely.
struct StepProcess {
  std::vector<double> breakpoints;  // hours, first is 0
  std::vector<double> levels;
};

struct LoadPath {
  double dead = 0;
  StepProcess sustained;
  StepProcess extraordinary;
  double horizon_hours = 0;
};

// Samples one dwelling's load history over [0, horizon_hours).
LoadPath sample_load_path(const LoadModelParams& params, double horizon_hours, Rng& rng);

// Stress profile in psi for performance factor phi:
// phi * R_o * (gamma * dead + sustained + extraordinary) / (gamma alpha_d + alpha_l).
PiecewiseProfile assemble_load(const LoadPath& path, double phi, const LoadModelParams& params);

// The stress corresponding to a unit combined load ratio, phi R_o / (gamma
// alpha_d + alpha_l); multiplying by the dimensionless combined load gives
// the applied stress.
double design_live_load(double phi, const LoadModelParams& params);

// Largest combined dimensionless load ratio attained along the path.
double max_combined_ratio(const LoadPath& path, const LoadModelParams& params);

// Time average of a step process over [0, horizon_hours).
double time_average(const StepProcess& process, double horizon_hours);

// Fraction of [0, horizon_hours) during which the process is positive.
double time_fraction_positive(const StepProcess& process, double horizon_hours);

}  // namespace admkit
