#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace gslond {

/// Calibration constant that makes the descending sequence sum to alpha over j = 1..inf.
inline constexpr double kDescendingConstant = 0.07720838;

/// beta_j = C alpha log(max(j, 2)) / (j exp(sqrt(log j))), natural log.
double beta_unbounded(std::size_t j, double alpha, double c = kDescendingConstant);

/// Descending sequence rescaled so that beta_1 + ... + beta_N = alpha. j > N throws.
double beta_bounded(std::size_t j, double alpha, std::size_t n_bound,
                    double c = kDescendingConstant);

/// alpha / N. j > N throws.
double beta_equal(std::size_t j, double alpha, std::size_t n_bound);

/// H_j = 1 + 1/2 + ... + 1/j by direct summation.
double harmonic_number(std::size_t j);

enum class BetaMode { Unbounded, Bounded, Equal, Dependent };

std::string_view to_string(BetaMode mode);
BetaMode parse_beta_mode(std::string_view text);

/// Immutable generator of the per-hypothesis budget sequence beta_1, beta_2, ...
///
/// Bounded and Equal schedules carry an upper bound N on the number of
/// hypotheses and sum to alpha over 1..N; asking for j > N is a DomainError.
/// Dependent wraps another schedule and divides each term by H_j, which keeps
/// LOND valid under arbitrary dependence.
class BetaSchedule {
 public:
  static BetaSchedule unbounded(double alpha, double c = kDescendingConstant);
  static BetaSchedule bounded(double alpha, std::size_t n_bound, double c = kDescendingConstant);
  static BetaSchedule equal(double alpha, std::size_t n_bound);
  static BetaSchedule dependent(const BetaSchedule& base);

  /// beta_j for j >= 1.
  double operator()(std::size_t j) const;

  BetaMode mode() const noexcept { return mode_; }
  double alpha() const noexcept { return alpha_; }
  double constant() const noexcept { return c_; }
  std::optional<std::size_t> bound() const noexcept { return bound_; }
  /// Base schedule of a Dependent schedule, nullptr otherwise.
  const BetaSchedule* base() const noexcept { return base_.get(); }

  std::string describe() const;

 private:
  BetaSchedule(BetaMode mode, double alpha, double c, std::optional<std::size_t> bound);

  BetaMode mode_;
  double alpha_;
  double c_;
  std::optional<std::size_t> bound_;
  // alpha / (sum of the first N unbounded terms); only meaningful for Bounded.
  double scale_ = 1.0;
  std::shared_ptr<const BetaSchedule> base_;
};

}  // namespace gslond
