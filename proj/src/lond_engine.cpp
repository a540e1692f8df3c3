#include "gslond/lond_engine.hpp"

#include "gslond/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace gslond {

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("p-value must lie in [0, 1]");
  }
}

std::string hypothesis_name(std::size_t i) { return "H" + std::to_string(i); }

}  // namespace

std::string_view to_string(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::FixedLond: return "LOND";
    case ProcedureKind::GsLond: return "gsLOND";
    case ProcedureKind::GsLondII: return "gsLOND.II";
    case ProcedureKind::GsLondIII: return "gsLOND.III";
    case ProcedureKind::GsLondIIandIII: return "gsLOND.II.III";
    case ProcedureKind::LevelAlpha: return "level-alpha";
    case ProcedureKind::Bonferroni: return "Bonferroni";
  }
  return "?";
}

ProcedureKind parse_procedure(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (c != '.' && c != '_' && c != '-') {
      s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (s == "lond" || s == "fixedlond") return ProcedureKind::FixedLond;
  if (s == "gslond") return ProcedureKind::GsLond;
  if (s == "gslondii" || s == "gslond2") return ProcedureKind::GsLondII;
  if (s == "gslondiii" || s == "gslond3") return ProcedureKind::GsLondIII;
  if (s == "gslondiiiii" || s == "gslond23") return ProcedureKind::GsLondIIandIII;
  if (s == "levelalpha") return ProcedureKind::LevelAlpha;
  if (s == "bonferroni") return ProcedureKind::Bonferroni;
  throw ConfigError("procedure", "unknown procedure '" + std::string(text) + "'");
}

bool is_group_sequential(ProcedureKind kind) { return kind != ProcedureKind::FixedLond; }

std::string_view to_string(HypothesisState state) {
  switch (state) {
    case HypothesisState::PendingInterim: return "PendingInterim";
    case HypothesisState::PendingFinal: return "PendingFinal";
    case HypothesisState::RejectedInterim: return "RejectedInterim";
    case HypothesisState::RejectedFinal: return "RejectedFinal";
    case HypothesisState::RetainedFinal: return "RetainedFinal";
    case HypothesisState::StoppedFutility: return "StoppedFutility";
  }
  return "?";
}

std::string_view to_string(Stage stage) { return stage == Stage::Interim ? "interim" : "final"; }

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::RejectedInterim: return "RejectedInterim";
    case Outcome::StoppedFutility: return "StoppedFutility";
    case Outcome::Continue: return "Continue";
    case Outcome::RejectedFinal: return "RejectedFinal";
    case Outcome::RetainedFinal: return "RetainedFinal";
  }
  return "?";
}

void EngineConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha", "must lie in (0, 1)");
  }
  if (!(alpha_futility > 0.0 && alpha_futility <= 1.0)) {
    throw ConfigError("alpha_futility", "must lie in (0, 1]");
  }
  if (!(t1 > 0.0 && t1 < 1.0)) {
    throw ConfigError("t1", "must lie in (0, 1)");
  }
  if (is_group_sequential(procedure) && !(alpha_futility > spend(spending, alpha, t1))) {
    throw ConfigError("alpha_futility", "futility threshold must exceed the interim efficacy level");
  }
  if (procedure == ProcedureKind::Bonferroni && bonferroni_k == 0) {
    throw ConfigError("bonferroni_k", "Bonferroni needs the total number of hypotheses");
  }
}

LondEngine::LondEngine(EngineConfig config, std::shared_ptr<BoundaryCache> cache)
    : config_(std::move(config)), cache_(std::move(cache)) {
  config_.validate();
  if (!cache_) {
    cache_ = std::make_shared<BoundaryCache>();
  }
}

std::size_t LondEngine::register_hypothesis(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw DomainError("beta must lie in [0, 1)");
  }
  HypothesisRecord h;
  h.index = hypotheses_.size() + 1;
  h.beta = beta;
  hypotheses_.push_back(h);
  return h.index;
}

std::size_t LondEngine::register_next() {
  if (!config_.schedule) {
    throw StateError("engine has no beta schedule");
  }
  return register_hypothesis((*config_.schedule)(hypotheses_.size() + 1));
}

RejectionScope LondEngine::scope() const {
  switch (config_.procedure) {
    case ProcedureKind::GsLondIII:
    case ProcedureKind::GsLondIIandIII:
      return RejectionScope::All;
    default:
      return RejectionScope::BeforeIndex;
  }
}

std::size_t LondEngine::rejection_count(Timestamp as_of, RejectionScope scope,
                                        std::size_t i) const {
  std::size_t count = 0;
  for (const auto& [time, j] : rejections_) {
    if (time >= as_of) {
      break;
    }
    if (j == i) {
      continue;
    }
    if (scope == RejectionScope::All || j < i) {
      ++count;
    }
  }
  return count;
}

double LondEngine::level_at(std::size_t i, Timestamp at, RejectionScope scope) const {
  switch (config_.procedure) {
    case ProcedureKind::LevelAlpha:
      return config_.alpha;
    case ProcedureKind::Bonferroni:
      return config_.alpha / static_cast<double>(config_.bonferroni_k);
    default:
      break;
  }
  const double beta = hypothesis(i).beta;
  return beta * static_cast<double>(rejection_count(at, scope, i) + 1);
}

double LondEngine::fixed_level(std::size_t i) const {
  std::size_t count = 0;
  for (std::size_t j = 1; j < i; ++j) {
    if (hypotheses_[j - 1].rejected()) {
      ++count;
    }
  }
  return hypothesis(i).beta * static_cast<double>(count + 1);
}

double LondEngine::interim_level(std::size_t i, Timestamp at) const {
  if (config_.procedure == ProcedureKind::FixedLond) {
    return fixed_level(i);
  }
  return level_at(i, at, scope());
}

const HypothesisRecord& LondEngine::hypothesis(std::size_t i) const {
  if (i == 0 || i > hypotheses_.size()) {
    throw StateError("unknown hypothesis " + hypothesis_name(i));
  }
  return hypotheses_[i - 1];
}

HypothesisRecord& LondEngine::record(std::size_t i) {
  if (i == 0 || i > hypotheses_.size()) {
    throw StateError("unknown hypothesis " + hypothesis_name(i));
  }
  return hypotheses_[i - 1];
}

void LondEngine::check_time(Timestamp at) const {
  if (last_time_ && at < *last_time_) {
    throw StateError("timestamps must be nondecreasing");
  }
}

void LondEngine::append(const DecisionEvent& event) {
  log_.push_back(event);
  last_time_ = event.time;
  if (is_rejection(event.outcome)) {
    rejections_.emplace_back(event.time, event.index);
  }
}

Outcome LondEngine::submit_interim(std::size_t i, double p1, Timestamp at) {
  check_probability(p1);
  HypothesisRecord& h = record(i);
  if (config_.procedure == ProcedureKind::FixedLond) {
    throw StateError("fixed-sample LOND has no interim analysis");
  }
  if (h.state != HypothesisState::PendingInterim) {
    throw StateError(hypothesis_name(i) + " is not awaiting an interim analysis (state " +
                     std::string(to_string(h.state)) + ")");
  }
  check_time(at);

  const double level = level_at(i, at, scope());
  const double boundary = level > 0.0 ? cache_->solve(config_.spending, level, config_.t1).interim
                                      : 0.0;
  Outcome outcome = Outcome::Continue;
  if (boundary > 0.0 && p1 <= boundary) {
    outcome = Outcome::RejectedInterim;
    h.state = HypothesisState::RejectedInterim;
  } else if (p1 > config_.alpha_futility) {
    outcome = Outcome::StoppedFutility;
    h.state = HypothesisState::StoppedFutility;
  } else {
    h.state = HypothesisState::PendingFinal;
  }
  h.interim_level = level;
  h.interim_boundary = boundary;
  h.interim_time = at;
  append(DecisionEvent{i, Stage::Interim, at, p1, level, boundary, outcome});
  return outcome;
}

double LondEngine::final_boundary(const HypothesisRecord& h, double final_level, Timestamp at) {
  if (!(final_level > 0.0)) {
    return 0.0;
  }
  const double interim_boundary = *h.interim_boundary;
  bool exhaust = false;
  switch (config_.procedure) {
    case ProcedureKind::GsLondII:
      exhaust = final_level > *h.interim_level;
      break;
    case ProcedureKind::GsLondIIandIII:
      // Increment exhaustion is driven by earlier-indexed rejections only; the
      // all-scope count then sets the level being exhausted.
      exhaust = rejection_count(at, RejectionScope::BeforeIndex, h.index) >
                rejection_count(*h.interim_time, RejectionScope::BeforeIndex, h.index);
      break;
    default:
      break;
  }
  if (exhaust) {
    return cache_->exhaust(interim_boundary, final_level, config_.t1);
  }
  return cache_->solve(config_.spending, final_level, config_.t1).final;
}

Outcome LondEngine::submit_final(std::size_t i, double p, Timestamp at) {
  check_probability(p);
  HypothesisRecord& h = record(i);
  double level = 0.0;
  double boundary = 0.0;

  if (config_.procedure == ProcedureKind::FixedLond) {
    if (h.state != HypothesisState::PendingInterim) {
      throw StateError(hypothesis_name(i) + " has already been tested");
    }
    for (std::size_t j = 1; j < i; ++j) {
      if (!hypotheses_[j - 1].decided()) {
        throw StateError(hypothesis_name(i) + " cannot be tested before " + hypothesis_name(j));
      }
    }
    check_time(at);
    level = fixed_level(i);
    boundary = level;
  } else {
    if (h.state != HypothesisState::PendingFinal) {
      throw StateError(hypothesis_name(i) + " is not awaiting a final analysis (state " +
                       std::string(to_string(h.state)) + ")");
    }
    check_time(at);
    level = level_at(i, at, scope());
    boundary = final_boundary(h, level, at);
  }

  const Outcome outcome =
      boundary > 0.0 && p <= boundary ? Outcome::RejectedFinal : Outcome::RetainedFinal;
  h.state = outcome == Outcome::RejectedFinal ? HypothesisState::RejectedFinal
                                              : HypothesisState::RetainedFinal;
  h.final_level = level;
  h.final_boundary = boundary;
  h.final_time = at;
  append(DecisionEvent{i, Stage::Final, at, p, level, boundary, outcome});
  return outcome;
}

FdrSnapshot fdr_snapshot(const DecisionLog& log, const std::vector<bool>& is_null) {
  FdrSnapshot s;
  for (const auto& e : log) {
    if (!is_rejection(e.outcome)) {
      continue;
    }
    if (e.index == 0 || e.index > is_null.size()) {
      throw DomainError("truth vector does not cover hypothesis " + std::to_string(e.index));
    }
    ++s.rejections;
    if (is_null[e.index - 1]) {
      ++s.false_rejections;
    }
  }
  s.fdp = static_cast<double>(s.false_rejections) /
          static_cast<double>(std::max<std::size_t>(s.rejections, 1));
  return s;
}

}  // namespace gslond
