#pragma once

#include <cstdint>
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include "pcornet/dataset.hpp"
#include "pcornet/ggm.hpp"
#include "pcornet/netgen.hpp"

namespace pcornet {

struct RecoveryScore {
  double mse = 0.0;
  std::size_t n_selected = 0;
  double power = 0.0;
  std::optional<double> tdr;  // undefined when nothing is selected
};

/// MSE over the p(p-1)/2 pairs, power and tdr of the selected edges.
RecoveryScore score_recovery(const PartialCorrelationMatrix& estimate, const Network& selected,
                             const TrueNetwork& truth);

struct StabilityScore {
  double kappa = 0.0;
  int replicates = 0;
  std::vector<int> per_edge_counts;
};

/// Fleiss' kappa for two categories (selected / not selected) and R raters.
/// Throws KappaUndefined when chance agreement is 1.
StabilityScore fleiss_kappa(const std::vector<int>& counts, int replicates);

struct StabilityOptions {
  int replicates = 10;
  double drop_fraction = 0.1;
  std::uint64_t seed = 0;
  int k = 5;
  double fdr_threshold = 0.2;
  bool standardize = true;
  Execution execution = Execution::parallel;
};

/// Edge set a method selects on data: nonzeros for lasso-type methods,
/// local fdr below the threshold otherwise. A fully shrunk estimate (all
/// off-diagonals zero) selects nothing.
Network select_network(const PartialCorrelationMatrix& pcor, Method method, double fdr_threshold);

/// Estimates R networks, each on a subsample missing round(drop_fraction * n)
/// observations, and scores the agreement of their edge sets.
StabilityScore subsample_stability(const ExpressionMatrix& x, Method method, const StabilityOptions& options);

struct OverlapTable {
  std::vector<std::string> methods;
  /// entry (a, b): fraction of a's edges also selected by b; undefined for empty a.
  std::vector<std::vector<std::optional<double>>> overlap;
  std::vector<double> percent_selected;
};

/// Methods keep the order given. Throws DimensionError when p differs.
OverlapTable overlap_table(const std::vector<std::pair<std::string, Network>>& networks);

/// Degree / (p - 1) per gene.
std::vector<double> connectivity_distribution(const Network& network, Index p);

/// Fraction of edges with positive rho; undefined for an empty network.
std::optional<double> positive_edge_fraction(const Network& network);

/// Average ranks (1 = largest value), ties share the mean rank.
std::vector<double> descending_ranks(const std::vector<double>& values);

}  // namespace pcornet
