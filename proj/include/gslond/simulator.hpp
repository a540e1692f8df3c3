#pragma once

#include "gslond/boundaries.hpp"
#include "gslond/lond_engine.hpp"
#include "gslond/metrics.hpp"
#include "gslond/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <vector>

namespace gslond {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child);

/// Seed of replication r of a scenario: a function of the master seed, the
/// scenario's data hash and r only.
std::uint64_t replication_seed(const TrialScenario& scenario, std::size_t r);

/// Streams of one replication. Each arm owns a truth stream and a data stream
/// keyed by its creation number (1-based), the control arm owns one stream.
struct ReplicationStreams {
  std::uint64_t seed = 0;

  Rng arm_truth(std::size_t arm) const;
  Rng arm_data(std::size_t arm) const;
  Rng control() const;
};

struct ArmTruth {
  bool is_null = true;
  double effect = 0.0;

  friend bool operator==(const ArmTruth&, const ArmTruth&) = default;
};

/// Truth and effect sizes of the K initially planned arms.
std::vector<ArmTruth> assign_truth(const TrialScenario& scenario, const ReplicationStreams& streams);

/// Truth of the r-th replacement arm (r >= 1) in budget mode; `arm` is its creation number.
ArmTruth replacement_truth(const TrialScenario& scenario, const ReplicationStreams& streams,
                           std::size_t arm, std::size_t r);

/// Number of alternatives among K arms for the deterministic orders.
std::size_t alternative_count(std::size_t arms, double pi0);

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Start time of planned arm i (1-based): (i - 1) n_delta.
std::size_t arm_start(const TrialScenario& scenario, std::size_t arm);

/// Control patients used for an analysis of an arm started at `start` after
/// `treatment_n` of its treatment patients.
IndexRange control_window(ControlMode mode, std::size_t start, std::size_t treatment_n);
IndexRange control_window(const TrialScenario& scenario, std::size_t arm, Stage stage);

struct AnalysisEvent {
  std::size_t arm = 0;
  Stage stage = Stage::Interim;
  std::size_t time = 0;

  friend bool operator==(const AnalysisEvent&, const AnalysisEvent&) = default;
};

/// Analysis events of the K planned arms sorted by time; at equal times finals
/// precede interims and lower arm indices come first.
std::vector<AnalysisEvent> build_timeline(const TrialScenario& scenario);

struct TrialData {
  std::vector<std::vector<double>> treatment;  // treatment[i - 1] has n observations
  std::vector<double> control;                 // up to the last planned final analysis
};

/// Observations of the K planned arms. Arm i's k-th observation (0-based)
/// arrives at time start_i + k, control patient t at time t.
TrialData simulate_data(const TrialScenario& scenario, const std::vector<ArmTruth>& truth,
                        const ReplicationStreams& streams);

struct ReplicationRecord {
  DecisionLog log;
  std::vector<ArmTruth> truth;          // indexed by hypothesis index - 1
  std::vector<std::size_t> starts;      // start time per hypothesis
  std::vector<std::size_t> arm_ids;     // creation number per hypothesis
  ReplicationSummary summary;
};

/// Runs one platform trial: builds data, drives a LondEngine through the
/// analysis events, and, in budget mode, adds replacement arms when early
/// stops free enough of the budget.
ReplicationRecord run_replication(const TrialScenario& scenario, std::uint64_t seed,
                                  std::shared_ptr<BoundaryCache> cache = nullptr);

/// Percentage of planned treatment observations saved by early stopping
/// (denominator arms * n).
double saved_sample_pct(const ReplicationRecord& record);

struct ScenarioResult {
  TrialScenario scenario;
  MetricsAccumulator metrics;
};

using ProgressCallback = std::function<void(std::size_t index, const TrialScenario&)>;

/// Runs every scenario's replications on `jobs` worker threads. Results are
/// reduced in replication order, so they do not depend on `jobs`.
std::vector<ScenarioResult> run_grid(const std::vector<TrialScenario>& scenarios, std::size_t jobs,
                                     const ProgressCallback& progress = {},
                                     std::shared_ptr<BoundaryCache> cache = nullptr);

/// Replications [first, last) of one scenario folded into an accumulator.
MetricsAccumulator run_replications(const TrialScenario& scenario, std::size_t first,
                                    std::size_t last, std::size_t jobs,
                                    std::shared_ptr<BoundaryCache> cache = nullptr);

void write_results_csv(std::ostream& os, const std::vector<ScenarioResult>& results);

}  // namespace gslond
