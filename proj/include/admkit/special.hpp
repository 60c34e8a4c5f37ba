#pragma once

namespace admkit {

// Lower incomplete gamma function, integral of u^(s-1) e^-u over [0, x].
// Requires s > 0 and x >= 0.  Accurate to better than 1e-12 relative error
// for s in [0.1, 50] and x in [0, 500].
double lower_incomplete_gamma(double s, double x);

// log of the above, finite for x > 0 even where the linear value under- or
// overflows.  Returns -inf at x = 0.
double log_lower_incomplete_gamma(double s, double x);

// Variant taking log(x) directly so callers can describe x values whose
// linear representation underflows.
double log_lower_incomplete_gamma_from_log(double s, double log_x);

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF): Wichura's PPND16 rational
// approximations refined by Newton steps on the complementary tail.
// Returns -inf at p = 0 and +inf at p = 1; throws DomainError outside
// [0, 1].  The long double overload keeps tail probabilities that
// rounding p to double would destroy.
double normal_quantile(double p);
long double normal_quantile(long double p);

// log density of N(mean, sd^2) at x.
double log_normal_pdf(double x, double mean, double sd);

// log density of the inverse-gamma distribution with the given shape and rate
// at v; -inf for v <= 0.
double log_inverse_gamma_pdf(double v, double shape, double rate);

}  // namespace admkit
