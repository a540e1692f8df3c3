#pragma once

#include <map>
#include <shared_mutex>
#include <string_view>
#include <tuple>

namespace gslond {

/// Lan-DeMets spending function families.
enum class SpendingKind { OBrienFleming, Pocock };

std::string_view to_string(SpendingKind kind);
SpendingKind parse_spending_kind(std::string_view text);

/// Nominal one-sided p-value boundaries of a two-stage design.
struct BoundaryPair {
  double interim = 0.0;  // reject at the interim analysis iff p1 <= interim
  double final = 0.0;    // reject at the final analysis iff p <= final
  double t1 = 0.5;       // information fraction of the interim analysis
  double level = 0.0;    // nominal level the pair exhausts

  friend bool operator==(const BoundaryPair&, const BoundaryPair&) = default;
};

/// Cumulative type-I error spent at information fraction t in (0, 1].
///   OBF: 2 (1 - Phi(Phi^-1(1 - alpha/2) / sqrt(t)))
///   PO:  alpha log(1 + (e - 1) t)
double spend(SpendingKind kind, double alpha, double t);

/// Probability of rejecting under the global null with the given pair,
/// (1 - Phi(z1)) + P(Z1 < z1, Z2 >= z2) with corr(Z1, Z2) = sqrt(t1).
double crossing_probability(double interim, double final, double t1);

/// Final-stage boundary such that a pair starting with `alpha1_spent` at the
/// interim exhausts exactly `alpha_total`. Throws DomainError unless
/// alpha_total > alpha1_spent.
double exhaust_increment(double alpha1_spent, double alpha_total, double t1);

/// Interim boundary from the spending function, final boundary from the
/// remaining level alpha - spend(kind, alpha, t1).
BoundaryPair solve_two_stage(SpendingKind kind, double alpha, double t1);

/// Thread-safe memo of solve_two_stage / exhaust_increment keyed by exact
/// argument bits. Cached and fresh results are bit-identical.
class BoundaryCache {
 public:
  BoundaryPair solve(SpendingKind kind, double alpha, double t1);
  double exhaust(double alpha1_spent, double alpha_total, double t1);

  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::tuple<int, double, double>, BoundaryPair> pairs_;
  std::map<std::tuple<double, double, double>, double> increments_;
};

}  // namespace gslond
