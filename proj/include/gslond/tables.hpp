#pragma once

#include "gslond/beta_schedule.hpp"
#include "gslond/boundaries.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace gslond {

/// Boundaries of H_i for a given number of earlier rejections.
struct LevelRow {
  std::size_t prior_rejections = 0;
  double level = 0.0;                // fixed-sample LOND level beta_i (1 + R)
  std::vector<BoundaryPair> pairs;   // one per requested spending kind
};

/// Rows for R = 0 .. max_rejections.
std::vector<LevelRow> level_table(double beta, std::size_t max_rejections,
                                  const std::vector<SpendingKind>& kinds, double t1,
                                  BoundaryCache& cache);

/// Scripted fate of another hypothesis in a variant table.
enum class ScriptedOutcome { Retain, RejectInterim, RejectFinal };

std::string_view to_string(ScriptedOutcome outcome);

/// Staggered two-stage platform used for the variant tables: hypothesis i
/// starts at (i - 1) n_delta, has its interim at start + n1 and its final at
/// start + n.
struct VariantDesign {
  std::size_t hypotheses = 3;
  std::size_t n = 50;
  std::size_t n1 = 25;
  std::size_t n_delta = 20;
  double alpha = 0.05;
  double alpha_futility = 0.5;
  SpendingKind spending = SpendingKind::Pocock;
};

/// Boundaries the target hypothesis receives under each group-sequential variant.
struct VariantBoundaries {
  double gs_interim = 0.0;
  double gs_final = 0.0;
  double ii_final = 0.0;
  double iii_interim = 0.0;
  double iii_final = 0.0;
  double ii_iii_final = 0.0;
};

struct VariantRow {
  std::vector<ScriptedOutcome> others;  // fates of the other hypotheses, in index order
  VariantBoundaries boundaries;
};

/// Enumerates every combination of fates of the other hypotheses (first one
/// varying slowest, in the order retain, reject interim, reject final) and
/// replays the platform through a LondEngine per variant. The target
/// continues at its interim and is retained at its final analysis.
std::vector<VariantRow> variant_table(const VariantDesign& design, const BetaSchedule& betas,
                                      std::size_t target, BoundaryCache& cache);

}  // namespace gslond
