#pragma once

#include "gslond/beta_schedule.hpp"
#include "gslond/boundaries.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace gslond {

/// Time on the control-patient index scale. Only ordering matters to the engine.
using Timestamp = double;

enum class ProcedureKind {
  FixedLond,      // single-stage LOND
  GsLond,         // levels from j < i, spending function re-evaluated at the final level
  GsLondII,       // as GsLond, final boundary exhausts an increased level
  GsLondIII,      // levels count rejections of every other hypothesis (experimental)
  GsLondIIandIII, // both modifications
  LevelAlpha,     // unadjusted comparator, alpha_i = alpha
  Bonferroni,     // alpha_i = alpha / K with K known in advance
};

std::string_view to_string(ProcedureKind kind);
ProcedureKind parse_procedure(std::string_view text);
bool is_group_sequential(ProcedureKind kind);

enum class HypothesisState {
  PendingInterim,
  PendingFinal,
  RejectedInterim,
  RejectedFinal,
  RetainedFinal,
  StoppedFutility,
};

std::string_view to_string(HypothesisState state);

enum class Stage { Interim, Final };
enum class Outcome { RejectedInterim, StoppedFutility, Continue, RejectedFinal, RetainedFinal };

std::string_view to_string(Stage stage);
std::string_view to_string(Outcome outcome);

inline bool is_rejection(Outcome o) {
  return o == Outcome::RejectedInterim || o == Outcome::RejectedFinal;
}

/// Which other hypotheses contribute rejections to the level of H_i.
enum class RejectionScope {
  BeforeIndex,  // j < i
  All,          // every j != i
};

struct HypothesisRecord {
  std::size_t index = 0;
  double beta = 0.0;
  HypothesisState state = HypothesisState::PendingInterim;
  std::optional<double> interim_level;
  std::optional<double> interim_boundary;
  std::optional<double> final_level;
  std::optional<double> final_boundary;
  std::optional<Timestamp> interim_time;
  std::optional<Timestamp> final_time;

  bool rejected() const {
    return state == HypothesisState::RejectedInterim || state == HypothesisState::RejectedFinal;
  }
  bool decided() const {
    return state != HypothesisState::PendingInterim && state != HypothesisState::PendingFinal;
  }
};

struct DecisionEvent {
  std::size_t index = 0;
  Stage stage = Stage::Interim;
  Timestamp time = 0.0;
  double p_value = 0.0;
  double level = 0.0;     // nominal level alpha_i at this analysis
  double boundary = 0.0;  // p-value boundary actually applied
  Outcome outcome = Outcome::Continue;

  friend bool operator==(const DecisionEvent&, const DecisionEvent&) = default;
};

using DecisionLog = std::vector<DecisionEvent>;

struct EngineConfig {
  double alpha = 0.025;
  double alpha_futility = 0.5;
  SpendingKind spending = SpendingKind::OBrienFleming;
  double t1 = 0.5;
  ProcedureKind procedure = ProcedureKind::GsLond;
  /// Total number of hypotheses for the Bonferroni comparator.
  std::size_t bonferroni_k = 0;
  /// Optional source of beta_i for register_next().
  std::optional<BetaSchedule> schedule;

  /// Throws ConfigError when the configuration is inconsistent.
  void validate() const;
};

/// Online LOND decision state machine for one platform trial.
///
/// Hypotheses are registered in their predefined testing order and then
/// analysed through submit_interim / submit_final with nondecreasing
/// timestamps. The nominal level of H_i at an analysis at time t is
/// beta_i (1 + #rejections recorded strictly before t within the procedure's
/// scope). Rejections that share a timestamp with the analysis do not count.
///
/// FixedLond tests each hypothesis once, in registration order, at
/// beta_i (1 + #rejections among H_1..H_{i-1}).
///
/// One engine is a single-writer object; distinct engines are independent and
/// may share a BoundaryCache.
class LondEngine {
 public:
  explicit LondEngine(EngineConfig config, std::shared_ptr<BoundaryCache> cache = nullptr);

  std::size_t register_hypothesis(double beta);
  /// Registers the next hypothesis with beta taken from the configured schedule.
  std::size_t register_next();

  std::size_t rejection_count(Timestamp as_of, RejectionScope scope, std::size_t i) const;
  RejectionScope scope() const;

  /// Nominal level H_i would receive at an interim analysis at time `at`.
  double interim_level(std::size_t i, Timestamp at) const;

  Outcome submit_interim(std::size_t i, double p1, Timestamp at);
  Outcome submit_final(std::size_t i, double p, Timestamp at);

  const HypothesisRecord& hypothesis(std::size_t i) const;
  std::span<const HypothesisRecord> hypotheses() const { return hypotheses_; }
  const DecisionLog& log() const { return log_; }
  const EngineConfig& config() const { return config_; }
  std::size_t size() const { return hypotheses_.size(); }

 private:
  HypothesisRecord& record(std::size_t i);
  void check_time(Timestamp at) const;
  double level_at(std::size_t i, Timestamp at, RejectionScope scope) const;
  double fixed_level(std::size_t i) const;
  double final_boundary(const HypothesisRecord& h, double final_level, Timestamp at);
  void append(const DecisionEvent& event);

  EngineConfig config_;
  std::shared_ptr<BoundaryCache> cache_;
  std::vector<HypothesisRecord> hypotheses_;
  DecisionLog log_;
  // (time, index) of every rejection, in decision order.
  std::vector<std::pair<Timestamp, std::size_t>> rejections_;
  std::optional<Timestamp> last_time_;
};

struct FdrSnapshot {
  std::size_t false_rejections = 0;  // V
  std::size_t rejections = 0;        // R
  double fdp = 0.0;                  // V / max(R, 1)
};

/// Realized false discovery proportion of a decision log. `is_null[i - 1]`
/// tells whether H_i is a true null.
FdrSnapshot fdr_snapshot(const DecisionLog& log, const std::vector<bool>& is_null);

}  // namespace gslond
