#pragma once

#include "gslond/beta_schedule.hpp"
#include "gslond/boundaries.hpp"
#include "gslond/lond_engine.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gslond {

enum class AlternativesOrder { Random, AlternativesFirst, AlternativesLast };

/// Concurrent controls only, or every control recruited so far.
enum class ControlMode { Concurrent, AllControls };

/// Fixed-budget arm replacement rules.
///   S1: pi0 and delta unchanged for added arms
///   S2: alternative effects drawn uniformly from {0.4, 0.8, 1.2} (all arms)
///   S3: pi0 drops by 1/80 with every added arm
///   S4: added alternatives have delta = 1
enum class BudgetScenario { S1, S2, S3, S4 };

std::string_view to_string(AlternativesOrder order);
std::string_view to_string(ControlMode mode);
std::string_view to_string(BudgetScenario scenario);
AlternativesOrder parse_order(std::string_view text);
ControlMode parse_control_mode(std::string_view text);
BudgetScenario parse_budget_scenario(std::string_view text);

struct BudgetConfig {
  std::size_t initial_arms = 10;      // K0
  std::size_t planned_controls = 0;   // C
  std::size_t total_budget = 0;       // B = K0 n + C
  BudgetScenario scenario = BudgetScenario::S1;

  /// Budget of the default platform with K0 staggered arms: C is the control
  /// count up to the last planned final analysis.
  static BudgetConfig planned(std::size_t initial_arms, std::size_t n, std::size_t n_delta,
                              BudgetScenario scenario);
};

/// Complete configuration of one simulated design point.
struct TrialScenario {
  std::string id = "scenario";
  std::size_t arms = 10;  // K, or K0 in budget mode
  BetaMode beta_mode = BetaMode::Unbounded;
  std::optional<std::size_t> n_bound;  // N; empty means unbounded
  BetaMode dependent_base = BetaMode::Unbounded;
  double pi0 = 0.5;
  double delta = 0.6;
  AlternativesOrder order = AlternativesOrder::Random;
  std::size_t n = 50;
  std::size_t n1 = 25;
  std::size_t n_delta = 20;
  ControlMode control = ControlMode::Concurrent;
  ProcedureKind procedure = ProcedureKind::GsLond;
  SpendingKind spending = SpendingKind::OBrienFleming;
  double alpha = 0.025;
  double alpha_futility = 0.5;
  std::optional<BudgetConfig> budget;
  std::size_t replications = 5000;
  std::uint64_t master_seed = 20220101;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  double t1() const { return static_cast<double>(n1) / static_cast<double>(n); }
  BetaSchedule schedule() const;
  EngineConfig engine_config() const;

  /// Hash of the fields that determine the simulated data (arms, truth, effects,
  /// geometry, budget rule). Procedures, designs and control modes evaluated on
  /// the same hash see identical data in every replication.
  std::uint64_t data_hash() const;
};

}  // namespace gslond
