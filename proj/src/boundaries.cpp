#include "gslond/boundaries.hpp"

#include "gslond/errors.hpp"
#include "gslond/stats.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <string>

namespace gslond {

namespace {

// Upper end of the z2 bracket; P(Z2 >= 8) is about 6e-16.
constexpr double kZUpper = 8.0;
constexpr double kResidualTolerance = 1e-10;

void check_t1(double t1) {
  if (!(t1 > 0.0 && t1 < 1.0)) {
    throw DomainError("interim information fraction must lie in (0, 1)");
  }
}

void check_level(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("nominal level must lie in (0, 1)");
  }
}

// z2 with P(Z1 < z1, Z2 >= z2) = target, corr = rho. The function is strictly
// decreasing in z2, so a bracketing solver always converges.
double solve_final_z(double z1, double target, double rho, double z_lower) {
  auto residual = [&](double z2) { return stats::bivariate_upper(z1, z2, rho) - target; };
  double lo = z_lower;
  double hi = kZUpper;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  // With a negligible interim spend the root sits at z_lower itself and
  // quadrature noise can put it just outside; step down a little.
  for (int k = 0; k < 8 && f_lo < 0.0; ++k) {
    lo -= 0.125;
    f_lo = residual(lo);
  }
  if (f_lo < 0.0 || f_hi > 0.0) {
    throw NumericalError("final boundary is not bracketed");
  }
  if (f_lo == 0.0) {
    return lo;
  }
  std::uintmax_t max_iter = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [a, b] =
      boost::math::tools::toms748_solve(residual, lo, hi, f_lo, f_hi, tol, max_iter);
  const double z2 = 0.5 * (a + b);
  if (std::abs(residual(z2)) > kResidualTolerance) {
    throw NumericalError("final boundary root did not reach the residual tolerance");
  }
  return z2;
}

}  // namespace

std::string_view to_string(SpendingKind kind) {
  return kind == SpendingKind::OBrienFleming ? "obf" : "po";
}

SpendingKind parse_spending_kind(std::string_view text) {
  if (text == "obf" || text == "OBF") return SpendingKind::OBrienFleming;
  if (text == "po" || text == "PO") return SpendingKind::Pocock;
  throw ConfigError("spending", "unknown spending function '" + std::string(text) + "'");
}

double spend(SpendingKind kind, double alpha, double t) {
  check_level(alpha);
  if (!(t > 0.0 && t <= 1.0)) {
    throw DomainError("information fraction must lie in (0, 1]");
  }
  if (t == 1.0) {
    return alpha;
  }
  switch (kind) {
    case SpendingKind::OBrienFleming:
      return 2.0 * stats::normal_sf(stats::normal_upper_quantile(alpha / 2.0) / std::sqrt(t));
    case SpendingKind::Pocock:
      return alpha * std::log(1.0 + (std::numbers::e - 1.0) * t);
  }
  return alpha;
}

double crossing_probability(double interim, double final, double t1) {
  check_t1(t1);
  const double z1 = stats::normal_upper_quantile(interim);
  const double z2 = stats::normal_upper_quantile(final);
  return interim + stats::bivariate_upper(z1, z2, std::sqrt(t1));
}

double exhaust_increment(double alpha1_spent, double alpha_total, double t1) {
  check_t1(t1);
  check_level(alpha_total);
  if (!(alpha1_spent > 0.0)) {
    throw DomainError("interim boundary must be positive");
  }
  if (!(alpha_total > alpha1_spent)) {
    throw DomainError("no increment to spend: level does not exceed the interim boundary");
  }
  const double z1 = stats::normal_upper_quantile(alpha1_spent);
  const double z_lower = stats::normal_upper_quantile(alpha_total);
  const double z2 = solve_final_z(z1, alpha_total - alpha1_spent, std::sqrt(t1), z_lower);
  return stats::normal_sf(z2);
}

BoundaryPair solve_two_stage(SpendingKind kind, double alpha, double t1) {
  check_t1(t1);
  const double interim = spend(kind, alpha, t1);
  if (!(interim < alpha)) {
    throw NumericalError("spending function spent the whole level at the interim");
  }
  return BoundaryPair{interim, exhaust_increment(interim, alpha, t1), t1, alpha};
}

BoundaryPair BoundaryCache::solve(SpendingKind kind, double alpha, double t1) {
  const auto key = std::make_tuple(static_cast<int>(kind), alpha, t1);
  {
    std::shared_lock lock(mutex_);
    if (auto it = pairs_.find(key); it != pairs_.end()) {
      return it->second;
    }
  }
  const BoundaryPair pair = solve_two_stage(kind, alpha, t1);
  std::unique_lock lock(mutex_);
  pairs_.emplace(key, pair);
  return pair;
}

double BoundaryCache::exhaust(double alpha1_spent, double alpha_total, double t1) {
  const auto key = std::make_tuple(alpha1_spent, alpha_total, t1);
  {
    std::shared_lock lock(mutex_);
    if (auto it = increments_.find(key); it != increments_.end()) {
      return it->second;
    }
  }
  const double value = exhaust_increment(alpha1_spent, alpha_total, t1);
  std::unique_lock lock(mutex_);
  increments_.emplace(key, value);
  return value;
}

std::size_t BoundaryCache::size() const {
  std::shared_lock lock(mutex_);
  return pairs_.size() + increments_.size();
}

}  // namespace gslond
