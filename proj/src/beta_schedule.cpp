#include "gslond/beta_schedule.hpp"

#include "gslond/compensated_sum.hpp"
#include "gslond/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gslond {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1)");
  }
}

void check_index(std::size_t j) {
  if (j == 0) {
    throw DomainError("hypothesis indices start at 1");
  }
}

void check_within_bound(std::size_t j, std::size_t n_bound) {
  check_index(j);
  if (n_bound == 0) {
    throw DomainError("upper bound N must be positive");
  }
  if (j > n_bound) {
    throw DomainError("hypothesis index " + std::to_string(j) + " exceeds the bound N = " +
                      std::to_string(n_bound));
  }
}

double unbounded_partial_sum(std::size_t n_bound, double alpha, double c) {
  CompensatedSum sum;
  for (std::size_t k = 1; k <= n_bound; ++k) {
    sum.add(beta_unbounded(k, alpha, c));
  }
  return sum.value();
}

}  // namespace

double beta_unbounded(std::size_t j, double alpha, double c) {
  check_index(j);
  const double x = static_cast<double>(j);
  return c * alpha * std::log(std::max(x, 2.0)) / (x * std::exp(std::sqrt(std::log(x))));
}

double beta_bounded(std::size_t j, double alpha, std::size_t n_bound, double c) {
  check_within_bound(j, n_bound);
  return beta_unbounded(j, alpha, c) * (alpha / unbounded_partial_sum(n_bound, alpha, c));
}

double beta_equal(std::size_t j, double alpha, std::size_t n_bound) {
  check_within_bound(j, n_bound);
  return alpha / static_cast<double>(n_bound);
}

double harmonic_number(std::size_t j) {
  CompensatedSum sum;
  for (std::size_t k = 1; k <= j; ++k) {
    sum.add(1.0 / static_cast<double>(k));
  }
  return sum.value();
}

std::string_view to_string(BetaMode mode) {
  switch (mode) {
    case BetaMode::Unbounded: return "unbounded";
    case BetaMode::Bounded: return "bounded";
    case BetaMode::Equal: return "equal";
    case BetaMode::Dependent: return "dependent";
  }
  return "?";
}

BetaMode parse_beta_mode(std::string_view text) {
  if (text == "unbounded") return BetaMode::Unbounded;
  if (text == "bounded") return BetaMode::Bounded;
  if (text == "equal") return BetaMode::Equal;
  if (text == "dependent") return BetaMode::Dependent;
  throw ConfigError("beta_mode", "unknown beta mode '" + std::string(text) + "'");
}

BetaSchedule::BetaSchedule(BetaMode mode, double alpha, double c,
                           std::optional<std::size_t> bound)
    : mode_(mode), alpha_(alpha), c_(c), bound_(bound) {}

BetaSchedule BetaSchedule::unbounded(double alpha, double c) {
  check_alpha(alpha);
  return BetaSchedule(BetaMode::Unbounded, alpha, c, std::nullopt);
}

BetaSchedule BetaSchedule::bounded(double alpha, std::size_t n_bound, double c) {
  check_alpha(alpha);
  if (n_bound == 0) {
    throw DomainError("upper bound N must be positive");
  }
  BetaSchedule s(BetaMode::Bounded, alpha, c, n_bound);
  s.scale_ = alpha / unbounded_partial_sum(n_bound, alpha, c);
  return s;
}

BetaSchedule BetaSchedule::equal(double alpha, std::size_t n_bound) {
  check_alpha(alpha);
  if (n_bound == 0) {
    throw DomainError("upper bound N must be positive");
  }
  return BetaSchedule(BetaMode::Equal, alpha, 0.0, n_bound);
}

BetaSchedule BetaSchedule::dependent(const BetaSchedule& base) {
  if (base.mode() == BetaMode::Dependent) {
    throw DomainError("dependent adjustment cannot be applied twice");
  }
  BetaSchedule s(BetaMode::Dependent, base.alpha(), base.constant(), base.bound());
  s.base_ = std::make_shared<const BetaSchedule>(base);
  return s;
}

double BetaSchedule::operator()(std::size_t j) const {
  switch (mode_) {
    case BetaMode::Unbounded:
      return beta_unbounded(j, alpha_, c_);
    case BetaMode::Bounded:
      check_within_bound(j, *bound_);
      return beta_unbounded(j, alpha_, c_) * scale_;
    case BetaMode::Equal:
      return beta_equal(j, alpha_, *bound_);
    case BetaMode::Dependent:
      return (*base_)(j) / harmonic_number(j);
  }
  return 0.0;
}

std::string BetaSchedule::describe() const {
  std::ostringstream os;
  os << to_string(mode_);
  if (mode_ == BetaMode::Dependent) {
    os << "(" << base_->describe() << ")";
    return os.str();
  }
  os << "(alpha=" << alpha_;
  if (bound_) {
    os << ", N=" << *bound_;
  }
  os << ")";
  return os.str();
}

}  // namespace gslond
