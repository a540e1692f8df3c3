#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: series/continued fractions instead of erfc and Boost, and
// composite Simpson integration instead of Gauss-Kronrod.

#include <cstdint>

namespace oracle {

/// Phi(z) from the Maclaurin series of erf for |z| < 3 and the Laplace
/// continued fraction of erfc beyond.
double normal_cdf(double z);

/// Regularized incomplete beta I_x(a, b) by the modified Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student t CDF through the incomplete beta function.
double student_t_cdf(double t, double df);

/// P(Z1 < z1, Z2 >= z2) by composite Simpson integration of the conditional
/// tail over [-10, z1] with `panels` panels.
double bivariate_upper(double z1, double z2, double rho, int panels = 20000);

/// z with normal_cdf(z) = p by bisection.
double normal_quantile(double p);

/// Spending functions written out directly.
double obf_spend(double alpha, double t);
double po_spend(double alpha, double t);

/// Descending beta_j written out with natural logs, no rescaling.
double beta_descending(std::uint64_t j, double alpha);

}  // namespace oracle
