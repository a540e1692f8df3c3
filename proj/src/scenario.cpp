#include "gslond/scenario.hpp"

#include "gslond/errors.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace gslond {

namespace {

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (v >> (8 * i)) & 0xffU;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::string_view to_string(AlternativesOrder order) {
  switch (order) {
    case AlternativesOrder::Random: return "random";
    case AlternativesOrder::AlternativesFirst: return "first";
    case AlternativesOrder::AlternativesLast: return "last";
  }
  return "?";
}

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::Concurrent ? "CC" : "NCC+CC";
}

std::string_view to_string(BudgetScenario scenario) {
  switch (scenario) {
    case BudgetScenario::S1: return "s1";
    case BudgetScenario::S2: return "s2";
    case BudgetScenario::S3: return "s3";
    case BudgetScenario::S4: return "s4";
  }
  return "?";
}

AlternativesOrder parse_order(std::string_view text) {
  if (text == "random") return AlternativesOrder::Random;
  if (text == "first" || text == "alternatives_first") return AlternativesOrder::AlternativesFirst;
  if (text == "last" || text == "alternatives_last") return AlternativesOrder::AlternativesLast;
  throw ConfigError("order", "unknown order '" + std::string(text) + "'");
}

ControlMode parse_control_mode(std::string_view text) {
  if (text == "cc" || text == "CC") return ControlMode::Concurrent;
  if (text == "ncc" || text == "ncc+cc" || text == "NCC+CC" || text == "all") {
    return ControlMode::AllControls;
  }
  throw ConfigError("control", "unknown control mode '" + std::string(text) + "'");
}

BudgetScenario parse_budget_scenario(std::string_view text) {
  if (text == "s1" || text == "S1") return BudgetScenario::S1;
  if (text == "s2" || text == "S2") return BudgetScenario::S2;
  if (text == "s3" || text == "S3") return BudgetScenario::S3;
  if (text == "s4" || text == "S4") return BudgetScenario::S4;
  throw ConfigError("budget", "unknown budget scenario '" + std::string(text) + "'");
}

BudgetConfig BudgetConfig::planned(std::size_t initial_arms, std::size_t n, std::size_t n_delta,
                                   BudgetScenario scenario) {
  BudgetConfig b;
  b.initial_arms = initial_arms;
  b.planned_controls = initial_arms == 0 ? 0 : (initial_arms - 1) * n_delta + n;
  b.total_budget = initial_arms * n + b.planned_controls;
  b.scenario = scenario;
  return b;
}

void TrialScenario::validate() const {
  if (arms == 0) {
    throw ConfigError("K", "number of arms must be positive");
  }
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) {
    throw ConfigError("pi0", "must lie in [0, 1]");
  }
  if (n1 < 2 || n1 >= n) {
    throw ConfigError("n1", "stage-1 sample must satisfy 2 <= n1 < n");
  }
  if (n_delta == 0) {
    throw ConfigError("n_delta", "must be at least 1");
  }
  if (replications == 0) {
    throw ConfigError("replications", "must be positive");
  }
  if (!std::isfinite(delta)) {
    throw ConfigError("delta", "must be finite");
  }
  const bool needs_bound = beta_mode == BetaMode::Bounded || beta_mode == BetaMode::Equal ||
                           (beta_mode == BetaMode::Dependent &&
                            dependent_base != BetaMode::Unbounded);
  if (needs_bound && !n_bound) {
    throw ConfigError("N", "beta mode '" + std::string(to_string(beta_mode)) +
                               "' needs a finite upper bound");
  }
  if (beta_mode == BetaMode::Unbounded && n_bound) {
    throw ConfigError("N", "unbounded beta mode takes no upper bound");
  }
  if (n_bound && !budget && arms > *n_bound) {
    throw ConfigError("N", "upper bound is smaller than the number of arms");
  }
  if (budget && budget->initial_arms != arms) {
    throw ConfigError("budget", "initial arm count must equal K");
  }
  engine_config().validate();
}

BetaSchedule TrialScenario::schedule() const {
  auto make = [&](BetaMode mode) {
    switch (mode) {
      case BetaMode::Unbounded: return BetaSchedule::unbounded(alpha);
      case BetaMode::Bounded: return BetaSchedule::bounded(alpha, n_bound.value());
      case BetaMode::Equal: return BetaSchedule::equal(alpha, n_bound.value());
      case BetaMode::Dependent: break;
    }
    throw ConfigError("dependent_base", "dependent schedules need a base mode");
  };
  if (beta_mode == BetaMode::Dependent) {
    return BetaSchedule::dependent(make(dependent_base));
  }
  return make(beta_mode);
}

EngineConfig TrialScenario::engine_config() const {
  EngineConfig c;
  c.alpha = alpha;
  c.alpha_futility = alpha_futility;
  c.spending = spending;
  c.t1 = t1();
  c.procedure = procedure;
  c.bonferroni_k = arms;
  return c;
}

std::uint64_t TrialScenario::data_hash() const {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(arms));
  h.add(pi0);
  h.add(delta);
  h.add(static_cast<std::uint64_t>(order));
  h.add(static_cast<std::uint64_t>(n));
  h.add(static_cast<std::uint64_t>(n1));
  h.add(static_cast<std::uint64_t>(n_delta));
  if (budget) {
    h.add(std::uint64_t{1});
    h.add(static_cast<std::uint64_t>(budget->scenario));
    h.add(static_cast<std::uint64_t>(budget->total_budget));
  } else {
    h.add(std::uint64_t{0});
  }
  return h.value();
}

}  // namespace gslond
