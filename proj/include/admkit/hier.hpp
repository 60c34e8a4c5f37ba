#pragma once

#include <Eigen/Dense>
#include <array>

#include "admkit/rng.hpp"
#include "admkit/types.hpp"

namespace admkit {

using Vector10 = Eigen::Matrix<double, 10, 1>;

// Population-level parameters: lognormal location/scale pairs for a, b, c, n
// and for the positive variate eta with sigma0 = eta / (1 + eta).
struct HyperParams {
  double mu_a = 0, sigma_a = 0;
  double mu_b = 0, sigma_b = 0;
  double mu_c = 0, sigma_c = 0;
  double mu_n = 0, sigma_n = 0;
  double mu_sigma0 = 0, sigma_sigma0 = 0;

  Vector10 as_vector() const {
    Vector10 v;
    v << mu_a, sigma_a, mu_b, sigma_b, mu_c, sigma_c, mu_n, sigma_n, mu_sigma0, sigma_sigma0;
    return v;
  }

  static HyperParams from_vector(const Vector10& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
  }

  static const std::array<const char*, 10>& field_names() {
    static const std::array<const char*, 10> names = {
        "mu_a", "sigma_a", "mu_b", "sigma_b", "mu_c",
        "sigma_c", "mu_n", "sigma_n", "mu_sigma0", "sigma_sigma0"};
    return names;
  }

  bool finite() const { return as_vector().allFinite(); }

  bool scales_positive() const {
    return sigma_a > 0 && sigma_b > 0 && sigma_c > 0 && sigma_n > 0 && sigma_sigma0 > 0;
  }
};

// Independent priors: normal locations (variance 20, except variance 1 for
// mu_sigma0) and inverse-gamma on each squared scale.
struct PriorSpec {
  double location_variance = 20.0;
  double sigma0_location_variance = 1.0;
  double ig_shape = 0.01;
  double ig_rate = 0.01;
};

// Diagonal covariance of the random-walk proposal.
struct ProposalSpec {
  Vector10 diag;

  ProposalSpec() { diag << 0.01, 0.01, 0.01, 0.01, 0.2, 0.01, 0.01, 0.01, 0.1, 0.01; }
  explicit ProposalSpec(const Vector10& d) : diag(d) {}

  bool valid() const { return diag.allFinite() && (diag.array() > 0).all(); }
};

// log prior density at theta; -inf when any scale is nonpositive.  The
// inverse-gamma factor is evaluated at sigma^2 with no change-of-variable
// adjustment, matching how the chain stores sigma directly.
double log_prior(const HyperParams& theta, const PriorSpec& prior = {});

// Draws one board's coefficients from the population model.
RandomEffects sample_effects(const HyperParams& theta, Rng& rng);

// Symmetric random-walk step; consumes exactly ten normal draws.
HyperParams propose(const HyperParams& theta, const ProposalSpec& proposal, Rng& rng);

}  // namespace admkit
