#include "admkit/hier.hpp"

#include <cmath>

#include "admkit/special.hpp"

namespace admkit {

double log_prior(const HyperParams& theta, const PriorSpec& prior) {
  if (!theta.finite()) return -kInf;
  if (!theta.scales_positive()) return -kInf;
  double loc_sd = std::sqrt(prior.location_variance);
  double lp = log_normal_pdf(theta.mu_a, 0.0, loc_sd) +
              log_normal_pdf(theta.mu_b, 0.0, loc_sd) +
              log_normal_pdf(theta.mu_c, 0.0, loc_sd) +
              log_normal_pdf(theta.mu_n, 0.0, loc_sd) +
              log_normal_pdf(theta.mu_sigma0, 0.0, std::sqrt(prior.sigma0_location_variance));
  for (double sigma : {theta.sigma_a, theta.sigma_b, theta.sigma_c, theta.sigma_n,
                       theta.sigma_sigma0}) {
    lp += log_inverse_gamma_pdf(sigma * sigma, prior.ig_shape, prior.ig_rate);
  }
  return lp;
}

RandomEffects sample_effects(const HyperParams& theta, Rng& rng) {
  if (!theta.finite() || !theta.scales_positive()) {
    throw DomainError("sample_effects: hyperparameters must be finite with positive scales");
  }
  RandomEffects fx;
  fx.a = rng.lognormal(theta.mu_a, theta.sigma_a);
  fx.b = rng.lognormal(theta.mu_b, theta.sigma_b);
  fx.c = rng.lognormal(theta.mu_c, theta.sigma_c);
  fx.n = rng.lognormal(theta.mu_n, theta.sigma_n);
  // eta / (1 + eta) with eta = exp(z), written in the logistic form so large
  // z cannot overflow.
  double z = rng.normal(theta.mu_sigma0, theta.sigma_sigma0);
  fx.sigma0 = 1.0 / (1.0 + std::exp(-z));
  return fx;
}

HyperParams propose(const HyperParams& theta, const ProposalSpec& proposal, Rng& rng) {
  if (!proposal.valid()) throw DomainError("propose: proposal diagonal must be positive and finite");
  Vector10 v = theta.as_vector();
  for (int i = 0; i < 10; ++i) {
    v[i] += std::sqrt(proposal.diag[i]) * rng.normal();
  }
  return HyperParams::from_vector(v);
}

}  // namespace admkit
