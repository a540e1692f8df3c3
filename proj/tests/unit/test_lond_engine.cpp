#include <doctest.h>

#include "gslond/errors.hpp"
#include "gslond/lond_engine.hpp"
#include "gslond/simulator.hpp"
#include "gslond/stats.hpp"
#include "gslond/tables.hpp"

#include <cmath>

using namespace gslond;

namespace {

constexpr double kToyAlpha = 0.05;
constexpr double kToyBeta = kToyAlpha / 3.0;

EngineConfig toy_config(ProcedureKind procedure) {
  EngineConfig c;
  c.alpha = kToyAlpha;
  c.alpha_futility = 0.5;
  c.spending = SpendingKind::Pocock;
  c.t1 = 0.5;
  c.procedure = procedure;
  c.bonferroni_k = 3;
  return c;
}

LondEngine toy_engine(ProcedureKind procedure) {
  LondEngine e(toy_config(procedure));
  for (int i = 0; i < 3; ++i) {
    e.register_hypothesis(kToyBeta);
  }
  return e;
}

using F = ScriptedOutcome;

const VariantRow& find_row(const std::vector<VariantRow>& rows, F a, F b) {
  for (const auto& r : rows) {
    if (r.others[0] == a && r.others[1] == b) {
      return r;
    }
  }
  throw std::logic_error("row not found");
}

void check_close(double actual, double expected) {
  CHECK_MESSAGE(std::fabs(actual - expected) <= 5e-5, actual << " vs " << expected);
}

}  // namespace

TEST_CASE("variant boundaries of H2 in the toy ordering") {
  BoundaryCache cache;
  const auto rows =
      variant_table(VariantDesign{}, BetaSchedule::equal(kToyAlpha, 3), 2, cache);
  REQUIRE(rows.size() == 9);
  struct Expected {
    F h1, h3;
    double s1, s2, ii, iii, ii_iii;
  };
  const Expected table[] = {
      {F::Retain, F::Retain, 0.0103, 0.0089, 0.0089, 0.0089, 0.0089},
      {F::Retain, F::RejectInterim, 0.0103, 0.0089, 0.0089, 0.0190, 0.0190},
      {F::Retain, F::RejectFinal, 0.0103, 0.0089, 0.0089, 0.0089, 0.0089},
      {F::RejectInterim, F::Retain, 0.0207, 0.0190, 0.0190, 0.0190, 0.0190},
      {F::RejectInterim, F::RejectInterim, 0.0207, 0.0190, 0.0190, 0.0297, 0.0297},
      {F::RejectInterim, F::RejectFinal, 0.0207, 0.0190, 0.0190, 0.0190, 0.0190},
      {F::RejectFinal, F::Retain, 0.0103, 0.0190, 0.0279, 0.0190, 0.0279},
      {F::RejectFinal, F::RejectInterim, 0.0103, 0.0190, 0.0279, 0.0297, 0.0459},
      {F::RejectFinal, F::RejectFinal, 0.0103, 0.0190, 0.0279, 0.0190, 0.0279},
  };
  for (const auto& e : table) {
    const auto& b = find_row(rows, e.h1, e.h3).boundaries;
    check_close(b.gs_interim, e.s1);
    check_close(b.gs_final, e.s2);
    check_close(b.ii_final, e.ii);
    check_close(b.iii_final, e.iii);
    check_close(b.ii_iii_final, e.ii_iii);
    // H3's interim (time 65) comes after H2's interim (time 45).
    CHECK(b.iii_interim == b.gs_interim);
  }
}

TEST_CASE("variant boundaries of H3 in the toy ordering") {
  BoundaryCache cache;
  const auto rows =
      variant_table(VariantDesign{}, BetaSchedule::equal(kToyAlpha, 3), 3, cache);
  struct Expected {
    F h1, h2;
    double s1, s2, ii;
  };
  // H1 is decided before H3's interim either way, so "reject" covers both stages.
  const Expected table[] = {
      {F::Retain, F::Retain, 0.0103, 0.0089, 0.0089},
      {F::RejectInterim, F::Retain, 0.0207, 0.0190, 0.0190},
      {F::RejectFinal, F::Retain, 0.0207, 0.0190, 0.0190},
      {F::Retain, F::RejectInterim, 0.0207, 0.0190, 0.0190},
      {F::Retain, F::RejectFinal, 0.0103, 0.0190, 0.0279},
      {F::RejectInterim, F::RejectInterim, 0.0310, 0.0297, 0.0297},
      {F::RejectFinal, F::RejectInterim, 0.0310, 0.0297, 0.0297},
      {F::RejectInterim, F::RejectFinal, 0.0207, 0.0297, 0.0389},
      {F::RejectFinal, F::RejectFinal, 0.0207, 0.0297, 0.0389},
  };
  for (const auto& e : table) {
    const auto& b = find_row(rows, e.h1, e.h2).boundaries;
    check_close(b.gs_interim, e.s1);
    check_close(b.gs_final, e.s2);
    check_close(b.ii_final, e.ii);
  }
}

TEST_CASE("toy walk-through with the engine API") {
  auto e = toy_engine(ProcedureKind::GsLondII);
  CHECK(e.submit_interim(1, 0.3, 25) == Outcome::Continue);
  CHECK(e.submit_interim(2, 0.3, 45) == Outcome::Continue);
  CHECK(*e.hypothesis(2).interim_level == doctest::Approx(kToyBeta));
  CHECK(e.submit_final(1, 0.001, 50) == Outcome::RejectedFinal);
  CHECK(e.interim_level(3, 65) == doctest::Approx(2 * kToyBeta));
  CHECK(e.submit_interim(3, 0.3, 65) == Outcome::Continue);
  CHECK(e.submit_final(2, 0.5, 70) == Outcome::RetainedFinal);
  const auto& h2 = e.hypothesis(2);
  CHECK(*h2.final_level == doctest::Approx(2 * kToyBeta));
  CHECK(std::fabs(*h2.final_boundary - 0.0279) <= 5e-5);
  CHECK(std::fabs(crossing_probability(*h2.interim_boundary, *h2.final_boundary, 0.5) -
                  2 * kToyBeta) < 1e-10);
}

TEST_CASE("protocol violations are state errors") {
  auto e = toy_engine(ProcedureKind::GsLond);
  CHECK_THROWS_AS(e.submit_final(1, 0.1, 10), StateError);
  e.submit_interim(1, 0.2, 25);
  CHECK_THROWS_AS(e.submit_interim(1, 0.2, 30), StateError);
  CHECK_THROWS_AS(e.submit_interim(2, 0.2, 20), StateError);  // time runs backwards
  CHECK_THROWS_AS(e.submit_interim(4, 0.2, 40), StateError);
  CHECK_THROWS_AS(e.submit_interim(0, 0.2, 40), StateError);
  CHECK_THROWS_AS(e.submit_interim(2, 1.5, 40), DomainError);
  e.submit_final(1, 0.9, 50);
  CHECK_THROWS_AS(e.submit_final(1, 0.9, 51), StateError);
}

TEST_CASE("futility is strict, efficacy inclusive") {
  auto e = toy_engine(ProcedureKind::GsLond);
  CHECK(e.submit_interim(1, 0.5, 25) == Outcome::Continue);
  CHECK(e.submit_interim(2, std::nextafter(0.5, 1.0), 45) == Outcome::StoppedFutility);
  const double b = solve_two_stage(SpendingKind::Pocock, kToyBeta, 0.5).interim;
  CHECK(e.submit_interim(3, b, 65) == Outcome::RejectedInterim);
}

TEST_CASE("zero level never rejects") {
  LondEngine e(toy_config(ProcedureKind::GsLond));
  e.register_hypothesis(0.0);
  CHECK(e.submit_interim(1, 0.0, 1) == Outcome::Continue);
  CHECK(e.submit_final(1, 0.0, 2) == Outcome::RetainedFinal);
  CHECK(e.hypothesis(1).final_boundary == 0.0);
}

TEST_CASE("rejections at the analysis timestamp do not count") {
  auto e = toy_engine(ProcedureKind::GsLond);
  e.submit_interim(1, 0.0, 25);
  CHECK(e.rejection_count(25, RejectionScope::BeforeIndex, 2) == 0);
  CHECK(e.rejection_count(25.5, RejectionScope::BeforeIndex, 2) == 1);
  CHECK(e.submit_interim(2, 0.3, 25) == Outcome::Continue);
  CHECK(*e.hypothesis(2).interim_level == doctest::Approx(kToyBeta));
}

TEST_CASE("scopes") {
  auto e = toy_engine(ProcedureKind::GsLondIII);
  CHECK(e.scope() == RejectionScope::All);
  e.submit_interim(3, 0.0, 10);
  CHECK(e.interim_level(1, 20) == doctest::Approx(2 * kToyBeta));
  auto g = toy_engine(ProcedureKind::GsLond);
  g.submit_interim(3, 0.0, 10);
  CHECK(g.interim_level(1, 20) == doctest::Approx(kToyBeta));
}

TEST_CASE("fixed-sample LOND") {
  auto e = toy_engine(ProcedureKind::FixedLond);
  CHECK_THROWS_AS(e.submit_interim(1, 0.1, 25), StateError);
  CHECK_THROWS_AS(e.submit_final(2, 0.1, 70), StateError);  // H1 undecided
  CHECK(e.submit_final(1, 0.01, 50) == Outcome::RejectedFinal);
  CHECK(*e.hypothesis(1).final_boundary == doctest::Approx(kToyBeta));
  CHECK(e.submit_final(2, 0.03, 70) == Outcome::RejectedFinal);
  CHECK(*e.hypothesis(2).final_level == doctest::Approx(2 * kToyBeta));
  CHECK_FALSE(e.hypothesis(3).interim_level.has_value());
}

TEST_CASE("comparators use constant levels") {
  auto a = toy_engine(ProcedureKind::LevelAlpha);
  auto b = toy_engine(ProcedureKind::Bonferroni);
  for (auto* e : {&a, &b}) {
    e->submit_interim(1, 0.0, 25);
    e->submit_interim(2, 0.3, 45);
    e->submit_interim(3, 0.0, 65);
    e->submit_final(2, 0.9, 70);
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK(*a.hypothesis(i).interim_level == kToyAlpha);
    CHECK(*b.hypothesis(i).interim_level == doctest::Approx(kToyAlpha / 3));
  }
  CHECK(*a.hypothesis(2).final_level == kToyAlpha);
  CHECK(*b.hypothesis(2).final_level == doctest::Approx(kToyAlpha / 3));
}

TEST_CASE("fdr snapshot") {
  CHECK(fdr_snapshot({}, {}).fdp == 0.0);
  DecisionLog log;
  for (std::size_t i = 1; i <= 4; ++i) {
    log.push_back({i, Stage::Final, static_cast<double>(i), 0.0, 0.1, 0.1, Outcome::RejectedFinal});
  }
  log.push_back({5, Stage::Final, 6.0, 0.9, 0.1, 0.1, Outcome::RetainedFinal});
  const auto s = fdr_snapshot(log, {true, false, false, false, true});
  CHECK(s.false_rejections == 1);
  CHECK(s.rejections == 4);
  CHECK(s.fdp == 0.25);
  CHECK(fdr_snapshot(log, std::vector<bool>(5, true)).fdp == 1.0);
  CHECK_THROWS_AS(fdr_snapshot(log, {true}), DomainError);
}

TEST_CASE("procedure names round-trip") {
  for (auto k : {ProcedureKind::FixedLond, ProcedureKind::GsLond, ProcedureKind::GsLondII,
                 ProcedureKind::GsLondIII, ProcedureKind::GsLondIIandIII, ProcedureKind::LevelAlpha,
                 ProcedureKind::Bonferroni}) {
    CHECK(parse_procedure(to_string(k)) == k);
  }
  CHECK(parse_procedure("gslond_ii") == ProcedureKind::GsLondII);
  CHECK_THROWS_AS(parse_procedure("lord"), ConfigError);
}

// Properties over simulated decision logs.

namespace {

struct Run {
  TrialScenario scenario;
  ReplicationRecord record;
};

std::vector<Run> sample_runs(ProcedureKind procedure, SpendingKind spending) {
  std::vector<Run> runs;
  for (double pi0 : {0.2, 0.5, 0.8}) {
    for (auto control : {ControlMode::Concurrent, ControlMode::AllControls}) {
      TrialScenario s;
      s.arms = 12;
      s.beta_mode = BetaMode::Bounded;
      s.n_bound = 12;
      s.pi0 = pi0;
      s.delta = 0.8;
      s.control = control;
      s.procedure = procedure;
      s.spending = spending;
      s.n_delta = 10;  // overlapping arms
      for (std::size_t r = 0; r < 25; ++r) {
        runs.push_back({s, run_replication(s, replication_seed(s, r))});
      }
    }
  }
  return runs;
}

std::vector<Outcome> replay(const TrialScenario& s, const DecisionLog& log, std::size_t upto) {
  EngineConfig config = s.engine_config();
  LondEngine e(config);
  const auto betas = s.schedule();
  for (std::size_t i = 1; i <= s.arms; ++i) {
    e.register_hypothesis(betas(i));
  }
  std::vector<Outcome> out;
  for (std::size_t k = 0; k < upto; ++k) {
    const auto& ev = log[k];
    out.push_back(ev.stage == Stage::Interim ? e.submit_interim(ev.index, ev.p_value, ev.time)
                                             : e.submit_final(ev.index, ev.p_value, ev.time));
  }
  return out;
}

}  // namespace

TEST_CASE("online property: prefix replay reproduces each decision") {
  for (auto procedure : {ProcedureKind::GsLond, ProcedureKind::GsLondII, ProcedureKind::GsLondIII,
                         ProcedureKind::GsLondIIandIII, ProcedureKind::FixedLond}) {
    for (const auto& run : sample_runs(procedure, SpendingKind::Pocock)) {
      const auto& log = run.record.log;
      const auto full = replay(run.scenario, log, log.size());
      for (std::size_t k = 0; k < log.size(); ++k) {
        CHECK(full[k] == log[k].outcome);
      }
      // Decision k from the prefix ending at k equals the live decision.
      for (std::size_t k = 0; k < log.size(); k += 3) {
        CHECK(replay(run.scenario, log, k + 1).back() == log[k].outcome);
      }
    }
  }
}

TEST_CASE("replay determinism: identical inputs give identical logs") {
  for (const auto& run : sample_runs(ProcedureKind::GsLondIIandIII, SpendingKind::Pocock)) {
    const auto again = run_replication(run.scenario, replication_seed(run.scenario, 0));
    const auto first = run_replication(run.scenario, replication_seed(run.scenario, 0));
    CHECK(again.log == first.log);
  }
}

TEST_CASE("levels never decrease between interim and final") {
  for (auto procedure : {ProcedureKind::GsLond, ProcedureKind::GsLondII, ProcedureKind::GsLondIII,
                         ProcedureKind::GsLondIIandIII}) {
    for (const auto& run : sample_runs(procedure, SpendingKind::OBrienFleming)) {
      std::vector<double> interim(run.scenario.arms + 1, -1.0);
      for (const auto& ev : run.record.log) {
        if (ev.stage == Stage::Interim) {
          interim[ev.index] = ev.level;
        } else {
          CHECK(ev.level >= interim[ev.index]);
        }
      }
    }
  }
}

TEST_CASE("variant coincidence and exhaustion of increased levels") {
  for (auto kind : {SpendingKind::Pocock, SpendingKind::OBrienFleming}) {
    std::size_t increased = 0;
    for (const auto& run : sample_runs(ProcedureKind::GsLondII, kind)) {
      std::vector<DecisionEvent> interim(run.scenario.arms + 1);
      for (const auto& ev : run.record.log) {
        if (ev.stage == Stage::Interim) {
          interim[ev.index] = ev;
          continue;
        }
        const auto gs = solve_two_stage(kind, ev.level, 0.5);
        if (ev.level == interim[ev.index].level) {
          // Same as gsLOND when nothing changed in between.
          CHECK(ev.boundary == gs.final);
        } else {
          ++increased;
          const double b1 = interim[ev.index].boundary;
          CHECK(std::fabs(crossing_probability(b1, ev.boundary, 0.5) - ev.level) < 1e-8);
          CHECK(crossing_probability(b1, gs.final, 0.5) <= ev.level + 1e-12);
        }
      }
    }
    CHECK(increased > 0);
  }
}
