#include "gslond/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gslond {

double RunningStat::mean() const noexcept {
  if (count_ == 0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return sum_.value() / static_cast<double>(count_);
}

double RunningStat::standard_error() const noexcept {
  if (count_ < 2) {
    return 0.0;
  }
  const double n = static_cast<double>(count_);
  const double m = mean();
  const double var = std::max(0.0, (sum_sq_.value() - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

void MetricsAccumulator::add(const ReplicationSummary& r) {
  ++replications_;
  if (r.alternatives > 0) {
    power_.add(static_cast<double>(r.rejected_alternatives) /
               static_cast<double>(r.alternatives));
  }
  fdp_.add(static_cast<double>(r.false_rejections) /
           static_cast<double>(std::max<std::size_t>(r.rejections, 1)));
  saved_pct_.add(r.planned_observations == 0
                     ? 0.0
                     : 100.0 * static_cast<double>(r.saved_observations) /
                           static_cast<double>(r.planned_observations));
  saved_pct_stage2_.add(r.planned_stage2_observations == 0
                            ? 0.0
                            : 100.0 * static_cast<double>(r.saved_observations) /
                                  static_cast<double>(r.planned_stage2_observations));
  rejected_alternatives_.add(static_cast<double>(r.rejected_alternatives));
  arms_.add(static_cast<double>(r.arms));
}

void MetricsAccumulator::merge(const MetricsAccumulator& other) {
  power_.merge(other.power_);
  fdp_.merge(other.fdp_);
  saved_pct_.merge(other.saved_pct_);
  saved_pct_stage2_.merge(other.saved_pct_stage2_);
  rejected_alternatives_.merge(other.rejected_alternatives_);
  arms_.merge(other.arms_);
  replications_ += other.replications_;
}

}  // namespace gslond
