#include "pcornet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "pcornet/error.hpp"
#include "pcornet/fdr.hpp"
#include "pcornet/rng.hpp"

namespace pcornet {

RecoveryScore score_recovery(const PartialCorrelationMatrix& estimate, const Network& selected,
                             const TrueNetwork& truth) {
  const Index p = truth.p();
  if (estimate.p() != p || selected.p != p) throw DimensionError("estimate and truth differ in size");
  RecoveryScore score;
  double sse = 0.0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double d = estimate.rho(i, j) - truth.pcor.rho(i, j);
      sse += d * d;
    }
  }
  score.mse = sse / static_cast<double>(pair_count(p));
  const std::vector<bool> mask = truth.edge_mask();
  std::size_t hits = 0;
  for (const auto& e : selected.edges) {
    if (mask[pair_index(e.i, e.j, p)]) ++hits;
  }
  score.n_selected = selected.edges.size();
  score.power = truth.edges.empty() ? std::numeric_limits<double>::quiet_NaN()
                                    : static_cast<double>(hits) / static_cast<double>(truth.edges.size());
  if (score.n_selected > 0) score.tdr = static_cast<double>(hits) / static_cast<double>(score.n_selected);
  return score;
}

StabilityScore fleiss_kappa(const std::vector<int>& counts, int replicates) {
  if (replicates < 2) throw InvalidArgument("Fleiss' kappa needs at least 2 subsamples");
  if (counts.empty()) throw InvalidArgument("Fleiss' kappa needs at least one edge");
  const double r = replicates;
  const double items = static_cast<double>(counts.size());
  double selected = 0.0;
  double agreement = 0.0;
  for (int c : counts) {
    if (c < 0 || c > replicates) throw InvalidArgument("selection count outside [0, R]");
    const double n1 = c;
    const double n0 = r - n1;
    selected += n1;
    agreement += (n1 * n1 + n0 * n0 - r) / (r * (r - 1.0));
  }
  const double p1 = selected / (r * items);
  const double p0 = (r * items - selected) / (r * items);
  if (p1 == 0.0 || p0 == 0.0) throw KappaUndefined("every subsample made the same call on every edge");
  const double chance = p0 * p0 + p1 * p1;
  const double observed = agreement / items;
  StabilityScore score;
  score.kappa = (observed - chance) / (1.0 - chance);
  score.replicates = replicates;
  score.per_edge_counts = counts;
  return score;
}

Network select_network(const PartialCorrelationMatrix& pcor, Method method, double fdr_threshold) {
  Network nonzero = nonzero_network(pcor);
  if (is_sparse(method) || nonzero.edges.empty()) return nonzero;
  const FdrResult fdr = fit_empirical_null(upper_triangle(pcor.rho), fdr_threshold);
  return fdr_network(pcor, fdr, fdr_threshold);
}

StabilityScore subsample_stability(const ExpressionMatrix& x, Method method, const StabilityOptions& options) {
  const int r = options.replicates;
  if (r < 2) throw InvalidArgument("stability needs at least 2 subsamples");
  if (!(options.drop_fraction > 0.0 && options.drop_fraction < 0.5)) {
    throw InvalidArgument("drop fraction must lie in (0, 0.5)");
  }
  const Index n = x.n();
  const auto dropped = static_cast<Index>(std::floor(options.drop_fraction * static_cast<double>(n) + 0.5));
  if (n - dropped < 5) throw TooFewObservations("subsamples would keep fewer than 5 observations");

  std::vector<int> counts(pair_count(x.p()), 0);
  for (int s = 0; s < r; ++s) {
    Rng rng(derive_seed(options.seed, {static_cast<std::uint64_t>(s), 0}));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(std::span<Index>(order));
    std::vector<Index> keep(order.begin() + dropped, order.end());
    std::sort(keep.begin(), keep.end());

    ExpressionMatrix sub;
    sub.values = select_rows(x.values, keep);
    sub.gene_labels = x.gene_labels;
    EstimateOptions est;
    est.k = std::min<int>(options.k, static_cast<int>(keep.size()));
    est.seed = derive_seed(options.seed, {static_cast<std::uint64_t>(s), 1});
    est.standardize = options.standardize;
    est.execution = options.execution;
    try {
      const auto pcor = estimate_network(sub, method, est).pcor;
      for (const auto& e : select_network(pcor, method, options.fdr_threshold).edges) {
        ++counts[pair_index(e.i, e.j, x.p())];
      }
    } catch (const Error& e) {
      throw Error("subsample " + std::to_string(s) + ": " + e.what());
    }
  }
  return fleiss_kappa(counts, r);
}

OverlapTable overlap_table(const std::vector<std::pair<std::string, Network>>& networks) {
  if (networks.size() < 2) throw InvalidArgument("overlap needs at least 2 methods");
  const Index p = networks.front().second.p;
  std::vector<std::set<std::pair<Index, Index>>> sets;
  OverlapTable table;
  for (const auto& [name, net] : networks) {
    if (net.p != p) throw DimensionError("networks differ in gene count");
    std::set<std::pair<Index, Index>> s;
    for (const auto& e : net.edges) s.emplace(std::min(e.i, e.j), std::max(e.i, e.j));
    table.methods.push_back(name);
    table.percent_selected.push_back(100.0 * static_cast<double>(s.size()) / static_cast<double>(pair_count(p)));
    sets.push_back(std::move(s));
  }
  for (const auto& a : sets) {
    std::vector<std::optional<double>> row;
    for (const auto& b : sets) {
      if (a.empty()) {
        row.emplace_back(std::nullopt);
        continue;
      }
      std::size_t shared = 0;
      for (const auto& e : a) shared += b.count(e);
      row.emplace_back(static_cast<double>(shared) / static_cast<double>(a.size()));
    }
    table.overlap.push_back(std::move(row));
  }
  return table;
}

std::vector<double> connectivity_distribution(const Network& network, Index p) {
  if (p < 2) throw InvalidArgument("connectivity needs at least 2 genes");
  std::vector<double> degree(static_cast<std::size_t>(p), 0.0);
  for (const auto& e : network.edges) {
    if (e.i < 0 || e.j < 0 || e.i >= p || e.j >= p) throw DimensionError("edge refers to an unknown gene");
    degree[static_cast<std::size_t>(e.i)] += 1.0;
    degree[static_cast<std::size_t>(e.j)] += 1.0;
  }
  for (double& d : degree) d /= static_cast<double>(p - 1);
  return degree;
}

std::optional<double> positive_edge_fraction(const Network& network) {
  if (network.edges.empty()) return std::nullopt;
  const auto positive = std::count_if(network.edges.begin(), network.edges.end(), [](const Edge& e) { return e.rho > 0.0; });
  return static_cast<double>(positive) / static_cast<double>(network.edges.size());
}

std::vector<double> descending_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

}  // namespace pcornet
