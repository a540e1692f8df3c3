#pragma once

#include "gslond/compensated_sum.hpp"

#include <cstddef>

namespace gslond {

/// Mean and Monte-Carlo standard error of a stream of values.
class RunningStat {
 public:
  void add(double x) noexcept {
    sum_.add(x);
    sum_sq_.add(x * x);
    ++count_;
  }
  void merge(const RunningStat& other) noexcept {
    sum_.merge(other.sum_);
    sum_sq_.merge(other.sum_sq_);
    count_ += other.count_;
  }

  std::size_t count() const noexcept { return count_; }
  /// NaN when empty.
  double mean() const noexcept;
  /// Standard error of the mean; 0 for fewer than two values.
  double standard_error() const noexcept;

 private:
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
  std::size_t count_ = 0;
};

/// Per-replication contribution to the grid metrics.
struct ReplicationSummary {
  std::size_t arms = 0;
  std::size_t alternatives = 0;
  std::size_t rejected_alternatives = 0;
  std::size_t false_rejections = 0;
  std::size_t rejections = 0;
  std::size_t saved_observations = 0;
  std::size_t planned_observations = 0;         // arms * n
  std::size_t planned_stage2_observations = 0;  // arms * (n - n1)
  std::size_t consumed_observations = 0;        // treatment + control
};

/// Mergeable aggregate over replications. Power is averaged only over
/// replications that contain at least one alternative.
class MetricsAccumulator {
 public:
  void add(const ReplicationSummary& r);
  void merge(const MetricsAccumulator& other);

  std::size_t replications() const noexcept { return replications_; }
  std::size_t replications_without_alternatives() const noexcept {
    return replications_ - power_.count();
  }

  const RunningStat& power() const noexcept { return power_; }
  const RunningStat& fdp() const noexcept { return fdp_; }
  const RunningStat& saved_pct() const noexcept { return saved_pct_; }
  const RunningStat& saved_pct_stage2() const noexcept { return saved_pct_stage2_; }
  const RunningStat& rejected_alternatives() const noexcept { return rejected_alternatives_; }
  const RunningStat& arms() const noexcept { return arms_; }

 private:
  RunningStat power_;
  RunningStat fdp_;
  RunningStat saved_pct_;
  RunningStat saved_pct_stage2_;
  RunningStat rejected_alternatives_;
  RunningStat arms_;
  std::size_t replications_ = 0;
};

}  // namespace gslond
