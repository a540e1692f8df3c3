#pragma once

#include <cstddef>
#include <span>

namespace gslond::stats {

/// Standard normal CDF. Saturates to 0/1 in the far tails.
double normal_cdf(double z);

/// Upper tail 1 - Phi(z), computed without cancellation.
double normal_sf(double z);

double normal_pdf(double z);

/// Inverse of normal_cdf. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// Inverse of normal_sf, i.e. the z with upper-tail probability p.
double normal_upper_quantile(double p);

/// Student t CDF with (possibly non-integer) degrees of freedom. df <= 0 throws.
double student_t_cdf(double t, double df);

/// Upper tail 1 - F_t(t; df).
double student_t_sf(double t, double df);

/// P(Z1 < z1, Z2 >= z2) for a standard bivariate normal pair with correlation rho.
///
/// Computed by adaptive Gauss-Kronrod quadrature of the conditional upper tail of
/// Z2 given Z1 = x over the density of Z1. Absolute error is below 1e-12 for
/// the correlations used in two-stage designs. Throws DomainError for |rho| >= 1.
double bivariate_upper(double z1, double z2, double rho);

/// P(Z1 < z1, Z2 < z2), the complement of bivariate_upper within {Z1 < z1}.
double bivariate_lower(double z1, double z2, double rho);

/// Sufficient statistics of one sample for the pooled-variance t-test.
struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  /// Sum of squared deviations from the mean.
  double ss = 0.0;
};

SampleSummary summarize(std::span<const double> xs);

/// One-sided p-value of the pooled-variance two-sample t-test for
/// H0: mu_treatment <= mu_control, df = n_t + n_c - 2.
///
/// Throws DomainError if either sample has fewer than two observations and
/// DegenerateSampleError if the pooled variance vanishes.
double two_sample_t_pvalue(std::span<const double> treatment, std::span<const double> control);
double two_sample_t_pvalue(const SampleSummary& treatment, const SampleSummary& control);

}  // namespace gslond::stats
