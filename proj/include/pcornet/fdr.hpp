#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pcornet/ggm.hpp"

namespace pcornet {

/// Null density of a sample (partial) correlation with kappa degrees of
/// freedom: f0(r) = (1 - r^2)^((kappa-3)/2) / B(1/2, (kappa-1)/2).
double null_density(double r, double kappa);
/// P(|R| < c) under the null.
double null_abs_cdf(double c, double kappa);
/// c with P(|R| < c) = q.
double null_abs_quantile(double q, double kappa);

struct FdrResult {
  std::vector<double> statistics;
  double eta0 = 1.0;       // clamped to [0, 1]
  double eta0_raw = 1.0;   // unclamped factor used in the fdr formula
  double kappa_df = 0.0;
  std::vector<double> local_fdr;
  double threshold = 0.2;

  /// Local fdr at an arbitrary statistic, interpolated from the fitted curve.
  double lfdr_at(double r) const;
  std::string to_json() const;

  // Monotone curve: distinct |r| values, ascending, and their fdr.
  std::vector<double> curve_abs;
  std::vector<double> curve_fdr;
};

/// Two-group fit: the null parameter kappa by truncated likelihood on the
/// central statistics, the mixture density by a smoothed histogram, fdr made
/// non-increasing in |r| by pool-adjacent-violators. Throws TooFewStatistics
/// below 100 values and DegenerateDistribution for constant input.
FdrResult fit_empirical_null(const std::vector<double>& stats, double threshold = 0.2);

/// Indices with local fdr strictly below the threshold. Throws InvalidThreshold
/// outside [0, 1].
std::vector<std::size_t> select_edges(const FdrResult& result, double threshold);

/// Edges of the pcor matrix whose upper-triangle statistic passes the test.
Network fdr_network(const PartialCorrelationMatrix& pcor, const FdrResult& result, double threshold);

struct RocPoint {
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 1.0;
};

/// Throws RocUndefined if truth has no positives. Specificity is 1 when truth
/// has no negatives.
std::vector<RocPoint> roc_sweep(const FdrResult& result, const std::vector<bool>& truth,
                                const std::vector<double>& thresholds);

/// 0, 0.05, ..., 1.
std::vector<double> default_roc_thresholds();

}  // namespace pcornet
