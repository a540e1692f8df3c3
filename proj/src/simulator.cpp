#include "gslond/simulator.hpp"

#include "gslond/errors.hpp"
#include "gslond/stats.hpp"

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <span>
#include <thread>
#include <tuple>

namespace gslond {

namespace {

constexpr std::uint64_t kTruthStream = 1;
constexpr std::uint64_t kDataStream = 2;
constexpr std::uint64_t kControlStream = 3;

constexpr double kScenario2Effects[] = {0.4, 0.8, 1.2};
constexpr double kScenario3Decrement = 1.0 / 80.0;
constexpr double kScenario4Effect = 1.0;

double uniform(Rng& rng) { return boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Effect of an alternative; always consumes one uniform so that the stream
// layout does not depend on the budget rule.
double alternative_effect(const TrialScenario& s, Rng& rng, bool replacement) {
  const double u = uniform(rng);
  if (s.budget && s.budget->scenario == BudgetScenario::S2) {
    return kScenario2Effects[std::min<std::size_t>(static_cast<std::size_t>(u * 3.0), 2)];
  }
  if (replacement && s.budget && s.budget->scenario == BudgetScenario::S4) {
    return kScenario4Effect;
  }
  return s.delta;
}

std::vector<double> arm_observations(const TrialScenario& s, const ReplicationStreams& streams,
                                     std::size_t arm, double effect) {
  Rng rng = streams.arm_data(arm);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xs(s.n);
  for (auto& x : xs) {
    x = effect + normal(rng);
  }
  return xs;
}

class ControlStream {
 public:
  explicit ControlStream(const ReplicationStreams& streams) : rng_(streams.control()) {}

  std::span<const double> window(IndexRange r) {
    while (values_.size() < r.end) {
      values_.push_back(normal_(rng_));
    }
    return std::span<const double>(values_).subspan(r.begin, r.size());
  }

  std::vector<double> take(std::size_t count) {
    window({0, count});
    return {values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count)};
  }

 private:
  Rng rng_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> values_;
};

enum class EventKind { Final = 0, Interim = 1, Start = 2 };

// (time, kind, ordering key, arm slot). The ordering key is the hypothesis
// index for analyses and the creation number for starts.
using QueueKey = std::tuple<std::size_t, int, std::size_t, std::size_t>;

struct ArmSlot {
  std::size_t id = 0;          // creation number
  std::size_t hypothesis = 0;  // registration index, 0 until started
  std::size_t start = 0;
  ArmTruth truth;
  std::vector<double> observations;
  bool stopped_early = false;
};

class Replication {
 public:
  Replication(const TrialScenario& s, std::uint64_t seed, std::shared_ptr<BoundaryCache> cache)
      : s_(s), streams_{seed}, engine_(make_config(s), std::move(cache)), controls_(streams_) {}

  ReplicationRecord run() {
    const auto truth = assign_truth(s_, streams_);
    for (std::size_t a = 1; a <= s_.arms; ++a) {
      add_arm(arm_start(s_, a), truth[a - 1]);
    }
    while (!queue_.empty()) {
      const QueueKey key = *queue_.begin();
      queue_.erase(queue_.begin());
      const auto [time, kind, order, slot] = key;
      switch (static_cast<EventKind>(kind)) {
        case EventKind::Start: start(slot); break;
        case EventKind::Interim: interim(slot, time); break;
        case EventKind::Final: final(slot, time); break;
      }
    }
    return finish();
  }

 private:
  static EngineConfig make_config(const TrialScenario& s) {
    EngineConfig c = s.engine_config();
    c.schedule = s.schedule();
    return c;
  }

  void add_arm(std::size_t start, ArmTruth truth) {
    ArmSlot arm;
    arm.id = slots_.size() + 1;
    arm.start = start;
    arm.truth = truth;
    arm.observations = arm_observations(s_, streams_, arm.id, truth.effect);
    queue_.emplace(start, static_cast<int>(EventKind::Start), arm.id, slots_.size());
    slots_.push_back(std::move(arm));
  }

  void start(std::size_t slot) {
    ArmSlot& arm = slots_[slot];
    arm.hypothesis = engine_.register_next();
    if (is_group_sequential(s_.procedure)) {
      queue_.emplace(arm.start + s_.n1, static_cast<int>(EventKind::Interim), arm.hypothesis, slot);
    }
    queue_.emplace(arm.start + s_.n, static_cast<int>(EventKind::Final), arm.hypothesis, slot);
  }

  double p_value(const ArmSlot& arm, std::size_t treatment_n) {
    const auto treatment = std::span<const double>(arm.observations).first(treatment_n);
    const auto control = controls_.window(control_window(s_.control, arm.start, treatment_n));
    return stats::two_sample_t_pvalue(treatment, control);
  }

  void interim(std::size_t slot, std::size_t time) {
    ArmSlot& arm = slots_[slot];
    const Outcome outcome = engine_.submit_interim(arm.hypothesis, p_value(arm, s_.n1),
                                                   static_cast<Timestamp>(time));
    if (outcome == Outcome::RejectedInterim || outcome == Outcome::StoppedFutility) {
      arm.stopped_early = true;
      if (s_.budget) {
        replace(time);
      }
    }
  }

  void final(std::size_t slot, std::size_t time) {
    const ArmSlot& arm = slots_[slot];
    if (arm.stopped_early) {
      return;
    }
    engine_.submit_final(arm.hypothesis, p_value(arm, s_.n), static_cast<Timestamp>(time));
  }

  std::size_t treatment_committed() const {
    std::size_t total = 0;
    for (const auto& arm : slots_) {
      total += arm.stopped_early ? s_.n1 : s_.n;
    }
    return total;
  }

  std::size_t planned_end() const {
    std::size_t end = 0;
    for (const auto& arm : slots_) {
      end = std::max(end, arm.start + (arm.stopped_early ? s_.n1 : s_.n));
    }
    return end;
  }

  // Adds arms starting at `time` while the budget can pay for a complete arm
  // plus the controls needed to run it to its final analysis.
  void replace(std::size_t time) {
    const auto& b = *s_.budget;
    const auto bound = engine_.config().schedule->bound();
    while (true) {
      if (bound && slots_.size() + 1 > *bound) {
        return;
      }
      const std::size_t needed =
          treatment_committed() + s_.n + std::max(planned_end(), time + s_.n);
      if (needed > b.total_budget) {
        return;
      }
      const std::size_t id = slots_.size() + 1;
      add_arm(time, replacement_truth(s_, streams_, id, id - s_.arms));
    }
  }

  ReplicationRecord finish() {
    ReplicationRecord rec;
    rec.log = engine_.log();
    const std::size_t m = engine_.size();
    rec.truth.resize(m);
    rec.starts.resize(m);
    rec.arm_ids.resize(m);
    std::vector<bool> is_null(m);
    ReplicationSummary& sum = rec.summary;
    for (const auto& arm : slots_) {
      const std::size_t h = arm.hypothesis - 1;
      rec.truth[h] = arm.truth;
      rec.starts[h] = arm.start;
      rec.arm_ids[h] = arm.id;
      is_null[h] = arm.truth.is_null;
      if (!arm.truth.is_null) {
        ++sum.alternatives;
        if (engine_.hypothesis(arm.hypothesis).rejected()) {
          ++sum.rejected_alternatives;
        }
      }
      if (arm.stopped_early) {
        sum.saved_observations += s_.n - s_.n1;
      }
    }
    const FdrSnapshot fdr = fdr_snapshot(rec.log, is_null);
    sum.arms = m;
    sum.false_rejections = fdr.false_rejections;
    sum.rejections = fdr.rejections;
    sum.planned_observations = m * s_.n;
    sum.planned_stage2_observations = m * (s_.n - s_.n1);
    sum.consumed_observations = treatment_committed() + planned_end();
    return rec;
  }

  const TrialScenario& s_;
  ReplicationStreams streams_;
  LondEngine engine_;
  ControlStream controls_;
  std::vector<ArmSlot> slots_;
  std::set<QueueKey> queue_;
};

// Runs body(r) for r in [first, last) on up to `jobs` threads and rethrows
// the first exception.
template <typename Body>
void parallel_for(std::size_t first, std::size_t last, std::size_t jobs, Body body) {
  const std::size_t count = last - first;
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t r = first; r < last; ++r) {
      body(r);
    }
    return;
  }
  std::atomic<std::size_t> next{first};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < last; r = next++) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next = last;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t j = 0; j < jobs; ++j) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

std::string format_fixed(double x) {
  if (std::isnan(x)) {
    return "NA";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) {
  return splitmix64(parent ^ splitmix64(child));
}

std::uint64_t replication_seed(const TrialScenario& scenario, std::size_t r) {
  return derive_seed(derive_seed(scenario.master_seed, scenario.data_hash()), r);
}

Rng ReplicationStreams::arm_truth(std::size_t arm) const {
  return Rng(derive_seed(derive_seed(seed, kTruthStream), arm));
}

Rng ReplicationStreams::arm_data(std::size_t arm) const {
  return Rng(derive_seed(derive_seed(seed, kDataStream), arm));
}

Rng ReplicationStreams::control() const { return Rng(derive_seed(seed, kControlStream)); }

std::size_t alternative_count(std::size_t arms, double pi0) {
  const auto nulls = static_cast<std::size_t>(std::round(pi0 * static_cast<double>(arms)));
  return arms - std::min(nulls, arms);
}

std::vector<ArmTruth> assign_truth(const TrialScenario& s, const ReplicationStreams& streams) {
  const std::size_t m1 = alternative_count(s.arms, s.pi0);
  std::vector<ArmTruth> truth(s.arms);
  for (std::size_t a = 1; a <= s.arms; ++a) {
    Rng rng = streams.arm_truth(a);
    const double u = uniform(rng);
    bool is_null = true;
    switch (s.order) {
      case AlternativesOrder::Random: is_null = u < s.pi0; break;
      case AlternativesOrder::AlternativesFirst: is_null = a > m1; break;
      case AlternativesOrder::AlternativesLast: is_null = a <= s.arms - m1; break;
    }
    const double effect = alternative_effect(s, rng, false);
    truth[a - 1] = ArmTruth{is_null, is_null ? 0.0 : effect};
  }
  return truth;
}

ArmTruth replacement_truth(const TrialScenario& s, const ReplicationStreams& streams,
                           std::size_t arm, std::size_t r) {
  double pi0 = s.pi0;
  if (s.budget && s.budget->scenario == BudgetScenario::S3) {
    pi0 = std::max(0.0, s.pi0 - kScenario3Decrement * static_cast<double>(r));
  }
  Rng rng = streams.arm_truth(arm);
  const bool is_null = uniform(rng) < pi0;
  const double effect = alternative_effect(s, rng, true);
  return ArmTruth{is_null, is_null ? 0.0 : effect};
}

std::size_t arm_start(const TrialScenario& s, std::size_t arm) {
  if (arm == 0) {
    throw DomainError("arm indices start at 1");
  }
  return (arm - 1) * s.n_delta;
}

IndexRange control_window(ControlMode mode, std::size_t start, std::size_t treatment_n) {
  return mode == ControlMode::Concurrent ? IndexRange{start, start + treatment_n}
                                         : IndexRange{0, start + treatment_n};
}

IndexRange control_window(const TrialScenario& s, std::size_t arm, Stage stage) {
  return control_window(s.control, arm_start(s, arm), stage == Stage::Interim ? s.n1 : s.n);
}

std::vector<AnalysisEvent> build_timeline(const TrialScenario& s) {
  std::vector<AnalysisEvent> events;
  events.reserve(2 * s.arms);
  for (std::size_t a = 1; a <= s.arms; ++a) {
    const std::size_t start = arm_start(s, a);
    events.push_back({a, Stage::Interim, start + s.n1});
    events.push_back({a, Stage::Final, start + s.n});
  }
  std::sort(events.begin(), events.end(), [](const AnalysisEvent& x, const AnalysisEvent& y) {
    const int xs = x.stage == Stage::Final ? 0 : 1;
    const int ys = y.stage == Stage::Final ? 0 : 1;
    return std::tie(x.time, xs, x.arm) < std::tie(y.time, ys, y.arm);
  });
  return events;
}

TrialData simulate_data(const TrialScenario& s, const std::vector<ArmTruth>& truth,
                        const ReplicationStreams& streams) {
  if (truth.size() != s.arms) {
    throw DomainError("truth vector must have one entry per arm");
  }
  TrialData data;
  for (std::size_t a = 1; a <= s.arms; ++a) {
    data.treatment.push_back(arm_observations(s, streams, a, truth[a - 1].effect));
  }
  ControlStream controls(streams);
  data.control = controls.take(arm_start(s, s.arms) + s.n);
  return data;
}

ReplicationRecord run_replication(const TrialScenario& scenario, std::uint64_t seed,
                                  std::shared_ptr<BoundaryCache> cache) {
  return Replication(scenario, seed, std::move(cache)).run();
}

double saved_sample_pct(const ReplicationRecord& record) {
  const auto& s = record.summary;
  if (s.planned_observations == 0) {
    return 0.0;
  }
  return 100.0 * static_cast<double>(s.saved_observations) /
         static_cast<double>(s.planned_observations);
}

MetricsAccumulator run_replications(const TrialScenario& scenario, std::size_t first,
                                    std::size_t last, std::size_t jobs,
                                    std::shared_ptr<BoundaryCache> cache) {
  scenario.validate();
  if (!cache) {
    cache = std::make_shared<BoundaryCache>();
  }
  std::vector<ReplicationSummary> summaries(last - first);
  parallel_for(first, last, jobs, [&](std::size_t r) {
    summaries[r - first] = run_replication(scenario, replication_seed(scenario, r), cache).summary;
  });
  MetricsAccumulator acc;
  for (const auto& s : summaries) {
    acc.add(s);
  }
  return acc;
}

std::vector<ScenarioResult> run_grid(const std::vector<TrialScenario>& scenarios, std::size_t jobs,
                                     const ProgressCallback& progress,
                                     std::shared_ptr<BoundaryCache> cache) {
  for (const auto& s : scenarios) {
    s.validate();
  }
  if (!cache) {
    cache = std::make_shared<BoundaryCache>();
  }
  std::vector<ScenarioResult> results;
  results.reserve(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (progress) {
      progress(i, s);
    }
    results.push_back({s, run_replications(s, 0, s.replications, jobs, cache)});
  }
  return results;
}

void write_results_csv(std::ostream& os, const std::vector<ScenarioResult>& results) {
  os << "scenario_id,procedure,spending,control_mode,order,pi0,delta,K,N,power,power_se,fdr,"
        "fdr_se,saved_pct,saved_pct_se,mean_rejected_alternatives,replications,"
        "saved_pct_stage2basis,mean_rejected_alternatives_se,beta_mode,budget\n";
  for (const auto& [s, m] : results) {
    os << s.id << ',' << to_string(s.procedure) << ',' << to_string(s.spending) << ','
       << to_string(s.control) << ',' << to_string(s.order) << ',' << format_fixed(s.pi0) << ','
       << format_fixed(s.delta) << ',' << s.arms << ','
       << (s.n_bound ? std::to_string(*s.n_bound) : std::string("inf")) << ','
       << format_fixed(m.power().mean()) << ','
       << (m.power().count() ? format_fixed(m.power().standard_error()) : "NA") << ','
       << format_fixed(m.fdp().mean()) << ',' << format_fixed(m.fdp().standard_error()) << ','
       << format_fixed(m.saved_pct().mean()) << ',' << format_fixed(m.saved_pct().standard_error())
       << ',' << format_fixed(m.rejected_alternatives().mean()) << ',' << m.replications() << ','
       << format_fixed(m.saved_pct_stage2().mean()) << ','
       << format_fixed(m.rejected_alternatives().standard_error()) << ','
       << to_string(s.beta_mode) << ','
       << (s.budget ? std::string(to_string(s.budget->scenario)) : std::string("none")) << '\n';
  }
}

}  // namespace gslond
