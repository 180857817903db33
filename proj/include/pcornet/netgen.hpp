#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pcornet/dataset.hpp"
#include "pcornet/ggm.hpp"

namespace pcornet {

struct Topology {
  enum class Kind { density, clusters, stars };
  Kind kind = Kind::density;
  double density = 0.05;  // Kind::density
  int groups = 1;         // Kind::clusters and Kind::stars

  static Topology random_density(double d) { return {Kind::density, d, 1}; }
  static Topology clusters(int c) { return {Kind::clusters, 0.0, c}; }
  static Topology stars(int s) { return {Kind::stars, 0.0, s}; }

  /// "density(0.05)", "clusters(2)", "stars(3)".
  std::string label() const;
  /// Parses the label form; also accepts a bare number as a density.
  static Topology parse(const std::string& text);
};

struct TrueNetwork {
  PartialCorrelationMatrix pcor;
  /// Precision matrix with unit diagonal whose scaled negative off-diagonals are pcor.
  MatrixXd precision;
  std::vector<std::pair<Index, Index>> edges;  // i < j, sorted
  Topology topology;

  Index p() const { return pcor.p(); }
  /// Edge indicator per pair, in upper-triangle order.
  std::vector<bool> edge_mask() const;
  /// Correlation matrix implied by the precision matrix.
  MatrixXd correlation() const;
};

/// floor(d * p(p-1)/2 + 0.5) pairs chosen uniformly without replacement.
TrueNetwork simulate_pcor_density(Index p, double d, std::uint64_t seed);
/// Complete subgraphs (clusters) or hub-and-spoke groups (stars) over an even
/// split of the p genes; the first gene of a star group is its center.
TrueNetwork simulate_pcor_topology(Index p, const Topology& topology, std::uint64_t seed);
TrueNetwork simulate_network(Index p, const Topology& topology, std::uint64_t seed);

/// Pair sets before values are drawn.
std::vector<std::pair<Index, Index>> topology_pairs(Index p, const Topology& topology, std::uint64_t seed);
/// Sizes of the groups used by clusters/stars.
std::vector<Index> group_sizes(Index p, int groups);

/// n draws from N(0, Sigma) with Sigma the correlation matrix implied by the truth.
ExpressionMatrix sample_data(const TrueNetwork& truth, Index n, std::uint64_t seed);

struct ScenarioGrid {
  Index p = 100;
  std::vector<Index> sample_sizes{25, 50, 75, 100, 125, 150, 175, 200};
  int replications = 20;
  std::vector<Topology> topologies{Topology::random_density(0.05), Topology::random_density(0.10),
                                   Topology::random_density(0.15), Topology::random_density(0.20),
                                   Topology::random_density(0.25)};
  std::uint64_t root_seed = 1;

  void validate() const;
  static ScenarioGrid from_json(const std::string& text);
  static ScenarioGrid load(const std::filesystem::path& path);
};

void write_true_edges(std::ostream& out, const TrueNetwork& truth);

}  // namespace pcornet
