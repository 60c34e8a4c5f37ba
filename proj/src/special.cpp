#include "admkit/special.hpp"

#include <cmath>

#include "admkit/types.hpp"

namespace admkit {

namespace {

constexpr int kMaxIter = 2000;
constexpr double kEps = 1e-17;

// log of sum_{k>=0} x^k / (s (s+1) ... (s+k)), the series factor of the lower
// incomplete gamma function.  Converges for x < s + 1.
double log_series_sum(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= x / (s + k);
    sum += term;
    if (term < sum * kEps) break;
  }
  return std::log(sum);
}

// Continued fraction for the upper incomplete gamma function (modified Lentz).
// Returns log of the fraction value F where Gamma(s, x) = e^-x x^s F.
double log_upper_cf(double s, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::log(h);
}

void check_gamma_args(double s, double x) {
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("lower_incomplete_gamma: s must be positive and finite");
  if (!(x >= 0) || std::isnan(x)) throw DomainError("lower_incomplete_gamma: x must be nonnegative");
}

}  // namespace

double lower_incomplete_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0) return 0.0;
  if (std::isinf(x)) return std::tgamma(s);
  if (x < s + 1.0) {
    double log_sum = log_series_sum(s, x);
    return std::exp(s * std::log(x) - x + log_sum);
  }
  double log_q = -x + s * std::log(x) + log_upper_cf(s, x) - std::lgamma(s);
  double p = -std::expm1(log_q);
  return std::exp(std::lgamma(s)) * p;
}

double log_lower_incomplete_gamma(double s, double x) {
  check_gamma_args(s, x);
  if (x == 0) return -kInf;
  return log_lower_incomplete_gamma_from_log(s, std::log(x));
}

double log_lower_incomplete_gamma_from_log(double s, double log_x) {
  if (!(s > 0) || !std::isfinite(s)) throw DomainError("lower_incomplete_gamma: s must be positive and finite");
  if (log_x == -kInf) return -kInf;
  if (log_x == kInf) return std::lgamma(s);
  double x = std::exp(log_x);
  if (x < s + 1.0) {
    // x may underflow to 0 here; the series factor then reduces to 1/s and
    // the result stays finite through log_x.
    return s * log_x - x + log_series_sum(s, x);
  }
  double log_q = -x + s * log_x + log_upper_cf(s, x) - std::lgamma(s);
  return std::lgamma(s) + std::log1p(-std::exp(log_q));
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

long double normal_quantile(long double p) {
  if (std::isnan(p) || p < 0.0L || p > 1.0L) {
    throw DomainError("normal_quantile: p must lie in [0, 1]");
  }
  if (p == 0.0L) return -kInf;
  if (p == 1.0L) return kInf;
  static const double a[8] = {
      3.3871328727963666080e0,  1.3314166789178437745e2,  1.9715909503065514427e3,
      1.3731693765509461125e4,  4.5921953931549871457e4,  6.7265770927008700853e4,
      3.3430575583588128105e4,  2.5090809287301226727e3};
  static const double b[8] = {
      1.0,                      4.2313330701600911252e1,  6.8718700749205790830e2,
      5.3941960214247511077e3,  2.1213794301586595867e4,  3.9307895800092710610e4,
      2.8729085735721942674e4,  5.2264952788528545610e3};
  static const double c[8] = {
      1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static const double d[8] = {
      1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static const double e[8] = {
      6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static const double f[8] = {
      1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  auto ratio = [](const double* num, const double* den, long double r) {
    long double pn = num[7], pd = den[7];
    for (int i = 6; i >= 0; --i) {
      pn = pn * r + num[i];
      pd = pd * r + den[i];
    }
    return pn / pd;
  };

  long double q = p - 0.5L;
  long double x;
  if (std::fabs(q) <= 0.425L) {
    long double r = 0.180625L - q * q;
    x = q * ratio(a, b, r);
  } else {
    long double r = q < 0 ? p : 1.0L - p;
    r = std::sqrt(-std::log(r));
    x = r <= 5.0L ? ratio(c, d, r - 1.6L) : ratio(e, f, r - 5.0L);
    if (q < 0) x = -x;
  }

  // Newton steps against the complementary tail P(Z > |x|), which stays
  // cancellation-free on both sides of 1/2.  The tail mass min(p, 1-p) is
  // exact: for p >= 1/2 the subtraction is exact by Sterbenz.
  long double m = q < 0 ? p : 1.0L - p;
  long double ax = std::fabs(x);
  for (int it = 0; it < 2; ++it) {
    long double tail = 0.5L * std::erfc(ax * 0.707106781186547524400844362104849L);
    long double pdf = 0.398942280401432677939946059934382L * std::exp(-0.5L * ax * ax);
    if (!(pdf > 0.0L) || !std::isfinite(tail)) break;
    ax += (tail - m) / pdf;
  }
  return q < 0 ? -ax : ax;
}

double normal_quantile(double p) {
  return static_cast<double>(normal_quantile(static_cast<long double>(p)));
}

double log_normal_pdf(double x, double mean, double sd) {
  if (!(sd > 0)) throw DomainError("log_normal_pdf: sd must be positive");
  double z = (x - mean) / sd;
  return -0.9189385332046727 - std::log(sd) - 0.5 * z * z;
}

double log_inverse_gamma_pdf(double v, double shape, double rate) {
  if (!(shape > 0) || !(rate > 0)) throw DomainError("log_inverse_gamma_pdf: shape and rate must be positive");
  if (!(v > 0)) return -kInf;
  return shape * std::log(rate) - std::lgamma(shape) - (shape + 1.0) * std::log(v) - rate / v;
}

}  // namespace admkit
