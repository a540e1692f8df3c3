#include "gslond/stats.hpp"

#include "gslond/errors.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gslond::stats {

namespace {

// Beyond this the normal density contributes less than 1e-32 of mass.
constexpr double kTailCut = 12.0;

// Acklam's rational approximation for the lower half (p <= 0.5); relative error
// about 1e-9 before refinement.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for p in (0, 0.5], refined with Halley steps against erfc.
double quantile_lower(double p) {
  double x = acklam_lower(p);
  for (int step = 0; step < 2; ++step) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

void check_probability_open(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal quantile requires 0 < p < 1");
  }
}

void check_rho(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw DomainError("bivariate normal requires |rho| < 1");
  }
}

template <typename Integrand>
double integrate_over_z1(double z1, Integrand&& f) {
  if (z1 <= -kTailCut) {
    return 0.0;
  }
  const double upper = std::min(z1, kTailCut);
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, -kTailCut, upper, 15, 1e-13, &error);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_quantile(double p) {
  check_probability_open(p);
  if (p == 0.5) {
    return 0.0;
  }
  return p < 0.5 ? quantile_lower(p) : -quantile_lower(1.0 - p);
}

double normal_upper_quantile(double p) {
  check_probability_open(p);
  if (p == 0.5) {
    return 0.0;
  }
  return p < 0.5 ? -quantile_lower(p) : quantile_lower(1.0 - p);
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) {
    throw DomainError("student t requires df > 0");
  }
  if (std::isinf(t)) {
    return t > 0 ? 1.0 : 0.0;
  }
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), t);
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) {
    throw DomainError("student t requires df > 0");
  }
  if (std::isinf(t)) {
    return t > 0 ? 0.0 : 1.0;
  }
  return boost::math::cdf(
      boost::math::complement(boost::math::students_t_distribution<double>(df), t));
}

double bivariate_upper(double z1, double z2, double rho) {
  check_rho(rho);
  const double s = std::sqrt(1.0 - rho * rho);
  return integrate_over_z1(
      z1, [=](double x) { return normal_pdf(x) * normal_sf((z2 - rho * x) / s); });
}

double bivariate_lower(double z1, double z2, double rho) {
  check_rho(rho);
  const double s = std::sqrt(1.0 - rho * rho);
  return integrate_over_z1(
      z1, [=](double x) { return normal_pdf(x) * normal_cdf((z2 - rho * x) / s); });
}

SampleSummary summarize(std::span<const double> xs) {
  SampleSummary out;
  out.n = xs.size();
  if (xs.empty()) {
    return out;
  }
  double sum = 0.0;
  for (double x : xs) {
    sum += x;
  }
  out.mean = sum / static_cast<double>(xs.size());
  for (double x : xs) {
    const double d = x - out.mean;
    out.ss += d * d;
  }
  return out;
}

double two_sample_t_pvalue(const SampleSummary& treatment, const SampleSummary& control) {
  if (treatment.n < 2 || control.n < 2) {
    throw DomainError("two-sample t-test needs at least two observations per group");
  }
  const double nt = static_cast<double>(treatment.n);
  const double nc = static_cast<double>(control.n);
  const double df = nt + nc - 2.0;
  const double pooled_var = (treatment.ss + control.ss) / df;
  if (!(pooled_var > 0.0) || !std::isfinite(pooled_var)) {
    throw DegenerateSampleError("pooled variance is zero");
  }
  const double se = std::sqrt(pooled_var * (1.0 / nt + 1.0 / nc));
  const double t = (treatment.mean - control.mean) / se;
  return student_t_sf(t, df);
}

double two_sample_t_pvalue(std::span<const double> treatment, std::span<const double> control) {
  return two_sample_t_pvalue(summarize(treatment), summarize(control));
}

}  // namespace gslond::stats
