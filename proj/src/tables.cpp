#include "gslond/tables.hpp"

#include "gslond/errors.hpp"
#include "gslond/lond_engine.hpp"
#include "gslond/scenario.hpp"
#include "gslond/simulator.hpp"

#include <memory>

namespace gslond {

namespace {

std::shared_ptr<BoundaryCache> borrow(BoundaryCache& cache) {
  return std::shared_ptr<BoundaryCache>(&cache, [](BoundaryCache*) {});
}

const HypothesisRecord& replay(const VariantDesign& d, const BetaSchedule& betas,
                               std::size_t target,
                               const std::vector<ScriptedOutcome>& fates,
                               const std::vector<AnalysisEvent>& timeline, LondEngine& engine) {
  for (std::size_t i = 1; i <= d.hypotheses; ++i) {
    engine.register_hypothesis(betas(i));
  }
  auto fate = [&](std::size_t i) {
    if (i == target) {
      return ScriptedOutcome::Retain;
    }
    return fates[i < target ? i - 1 : i - 2];
  };
  for (const auto& e : timeline) {
    const ScriptedOutcome f = fate(e.arm);
    const auto at = static_cast<Timestamp>(e.time);
    if (e.stage == Stage::Interim) {
      engine.submit_interim(e.arm, f == ScriptedOutcome::RejectInterim ? 0.0 : d.alpha_futility,
                            at);
    } else if (engine.hypothesis(e.arm).state == HypothesisState::PendingFinal) {
      engine.submit_final(e.arm, f == ScriptedOutcome::RejectFinal ? 0.0 : 1.0, at);
    }
  }
  return engine.hypothesis(target);
}

}  // namespace

std::vector<LevelRow> level_table(double beta, std::size_t max_rejections,
                                  const std::vector<SpendingKind>& kinds, double t1,
                                  BoundaryCache& cache) {
  std::vector<LevelRow> rows;
  for (std::size_t r = 0; r <= max_rejections; ++r) {
    LevelRow row;
    row.prior_rejections = r;
    row.level = beta * static_cast<double>(r + 1);
    for (SpendingKind k : kinds) {
      row.pairs.push_back(cache.solve(k, row.level, t1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view to_string(ScriptedOutcome outcome) {
  switch (outcome) {
    case ScriptedOutcome::Retain: return "retain";
    case ScriptedOutcome::RejectInterim: return "reject interim";
    case ScriptedOutcome::RejectFinal: return "reject final";
  }
  return "?";
}

std::vector<VariantRow> variant_table(const VariantDesign& d, const BetaSchedule& betas,
                                      std::size_t target, BoundaryCache& cache) {
  if (target == 0 || target > d.hypotheses) {
    throw DomainError("target hypothesis out of range");
  }
  TrialScenario geometry;
  geometry.arms = d.hypotheses;
  geometry.n = d.n;
  geometry.n1 = d.n1;
  geometry.n_delta = d.n_delta;
  const auto timeline = build_timeline(geometry);

  EngineConfig config;
  config.alpha = d.alpha;
  config.alpha_futility = d.alpha_futility;
  config.spending = d.spending;
  config.t1 = static_cast<double>(d.n1) / static_cast<double>(d.n);

  const std::size_t others = d.hypotheses - 1;
  std::size_t combinations = 1;
  for (std::size_t k = 0; k < others; ++k) {
    combinations *= 3;
  }

  std::vector<VariantRow> rows;
  for (std::size_t c = 0; c < combinations; ++c) {
    VariantRow row;
    row.others.resize(others);
    std::size_t code = c;
    for (std::size_t k = others; k-- > 0;) {
      row.others[k] = static_cast<ScriptedOutcome>(code % 3);
      code /= 3;
    }
    auto run = [&](ProcedureKind kind) {
      config.procedure = kind;
      LondEngine engine(config, borrow(cache));
      return replay(d, betas, target, row.others, timeline, engine);
    };
    const HypothesisRecord gs = run(ProcedureKind::GsLond);
    const HypothesisRecord ii = run(ProcedureKind::GsLondII);
    const HypothesisRecord iii = run(ProcedureKind::GsLondIII);
    const HypothesisRecord both = run(ProcedureKind::GsLondIIandIII);
    row.boundaries = VariantBoundaries{*gs.interim_boundary,  *gs.final_boundary,
                                       *ii.final_boundary,    *iii.interim_boundary,
                                       *iii.final_boundary,   *both.final_boundary};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gslond
