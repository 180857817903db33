#include "pcornet/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "pcornet/error.hpp"
#include "pcornet/format.hpp"
#include "pcornet/rng.hpp"

namespace pcornet {

namespace {

constexpr int kMaxAttempts = 10;

void check_size(Index p) {
  if (p < 2) throw InvalidArgument("a network needs at least 2 genes");
}

std::vector<std::pair<Index, Index>> all_pairs(Index p) {
  std::vector<std::pair<Index, Index>> out;
  out.reserve(pair_count(p));
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) out.emplace_back(i, j);
  }
  return out;
}

std::vector<std::pair<Index, Index>> draw_pairs(Index p, const Topology& topology, Rng& rng) {
  std::vector<std::pair<Index, Index>> out;
  switch (topology.kind) {
    case Topology::Kind::density: {
      auto pairs = all_pairs(p);
      const auto count = static_cast<std::size_t>(std::floor(topology.density * static_cast<double>(pairs.size()) + 0.5));
      for (std::size_t k = 0; k < count; ++k) {
        const auto pick = k + static_cast<std::size_t>(rng.below(pairs.size() - k));
        std::swap(pairs[k], pairs[pick]);
      }
      out.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(count));
      break;
    }
    case Topology::Kind::clusters:
    case Topology::Kind::stars: {
      Index start = 0;
      for (Index size : group_sizes(p, topology.groups)) {
        for (Index a = start; a < start + size; ++a) {
          if (topology.kind == Topology::Kind::stars) {
            if (a > start) out.emplace_back(start, a);
            continue;
          }
          for (Index b = a + 1; b < start + size; ++b) out.emplace_back(a, b);
        }
        start += size;
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate(Index p, const Topology& topology) {
  check_size(p);
  if (topology.kind == Topology::Kind::density) {
    if (!(topology.density > 0.0 && topology.density < 1.0)) {
      throw InvalidArgument("density must lie strictly between 0 and 1");
    }
  } else if (topology.groups < 1 || topology.groups > p) {
    throw InvalidArgument("group count must lie in [1, p]");
  }
}

}  // namespace

std::string Topology::label() const {
  switch (kind) {
    case Kind::density: return "density(" + format_number(density) + ")";
    case Kind::clusters: return "clusters(" + std::to_string(groups) + ")";
    case Kind::stars: return "stars(" + std::to_string(groups) + ")";
  }
  return "unknown";
}

Topology Topology::parse(const std::string& text) {
  const auto open = text.find('(');
  try {
    if (open == std::string::npos) return random_density(std::stod(text));
    if (text.back() != ')') throw InvalidArgument("missing ')'");
    const std::string name = text.substr(0, open);
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    if (name == "density") return random_density(std::stod(arg));
    if (name == "clusters") return clusters(std::stoi(arg));
    if (name == "stars") return stars(std::stoi(arg));
  } catch (const std::logic_error&) {
  }
  throw InvalidArgument("cannot parse topology '" + text + "'");
}

std::vector<Index> group_sizes(Index p, int groups) {
  if (groups < 1 || groups > p) throw InvalidArgument("group count must lie in [1, p]");
  std::vector<Index> sizes(static_cast<std::size_t>(groups), p / groups);
  for (Index g = 0; g < p % groups; ++g) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

std::vector<std::pair<Index, Index>> topology_pairs(Index p, const Topology& topology, std::uint64_t seed) {
  validate(p, topology);
  Rng rng(derive_seed(seed, {0}));
  return draw_pairs(p, topology, rng);
}

std::vector<bool> TrueNetwork::edge_mask() const {
  std::vector<bool> mask(pair_count(p()), false);
  for (const auto& [i, j] : edges) mask[pair_index(i, j, p())] = true;
  return mask;
}

MatrixXd TrueNetwork::correlation() const {
  const Index p = precision.rows();
  Eigen::LLT<MatrixXd> llt(precision);
  MatrixXd sigma = llt.solve(MatrixXd::Identity(p, p));
  const VectorXd d = sigma.diagonal().cwiseSqrt().cwiseInverse();
  sigma = d.asDiagonal() * sigma * d.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  sigma.diagonal().setOnes();
  return sigma;
}

TrueNetwork simulate_network(Index p, const Topology& topology, std::uint64_t seed) {
  validate(p, topology);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(attempt)}));
    const auto pairs = draw_pairs(p, topology, rng);

    MatrixXd a = MatrixXd::Identity(p, p);
    for (const auto& [i, j] : pairs) {
      double v = 0.0;
      while (v == 0.0) v = rng.uniform(-1.0, 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
    // Diagonal dominance: row i's off-diagonals are divided by s_i + 1, where s_i
    // is the row's absolute off-diagonal sum. The two rescaled copies of a pair
    // are combined by their geometric mean a_ij / sqrt((s_i + 1)(s_j + 1)).
    VectorXd root(p);
    for (Index i = 0; i < p; ++i) root(i) = std::sqrt(a.row(i).cwiseAbs().sum());
    MatrixXd c = root.cwiseInverse().asDiagonal() * a * root.cwiseInverse().asDiagonal();
    c.diagonal().setOnes();

    Eigen::LLT<MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) continue;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) continue;

    TrueNetwork truth;
    truth.topology = topology;
    truth.precision = std::move(c);
    truth.pcor = pcor_from_precision(truth.precision, Method::shrink);
    truth.edges = pairs;
    return truth;
  }
  throw GenerationFailure("no positive definite network after " + std::to_string(kMaxAttempts) + " attempts");
}

TrueNetwork simulate_pcor_density(Index p, double d, std::uint64_t seed) {
  return simulate_network(p, Topology::random_density(d), seed);
}

TrueNetwork simulate_pcor_topology(Index p, const Topology& topology, std::uint64_t seed) {
  if (topology.kind == Topology::Kind::density) {
    throw InvalidArgument("simulate_pcor_topology expects clusters or stars");
  }
  return simulate_network(p, topology, seed);
}

ExpressionMatrix sample_data(const TrueNetwork& truth, Index n, std::uint64_t seed) {
  if (n < 3) throw TooFewObservations("need at least 3 observations, got " + std::to_string(n));
  const Index p = truth.p();
  Eigen::LLT<MatrixXd> llt(truth.correlation());
  if (llt.info() != Eigen::Success) throw GenerationFailure("implied correlation matrix is not positive definite");
  Rng rng(seed);
  MatrixXd z(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  }
  MatrixXd values = z * llt.matrixL().transpose();
  return make_expression_matrix(std::move(values));
}

void ScenarioGrid::validate() const {
  check_size(p);
  if (sample_sizes.empty()) throw InvalidArgument("scenario grid needs at least one sample size");
  for (Index n : sample_sizes) {
    if (n < 3) throw InvalidArgument("sample sizes must be at least 3");
  }
  if (replications < 1) throw InvalidArgument("replications must be at least 1");
  if (topologies.empty()) throw InvalidArgument("scenario grid needs at least one topology");
  for (const auto& t : topologies) pcornet::topology_pairs(p, t, 0);
}

ScenarioGrid ScenarioGrid::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid scenario grid JSON: ") + e.what());
  }
  ScenarioGrid grid;
  try {
    if (j.contains("p")) grid.p = j.at("p").get<Index>();
    if (j.contains("sample_sizes")) grid.sample_sizes = j.at("sample_sizes").get<std::vector<Index>>();
    if (j.contains("replications")) grid.replications = j.at("replications").get<int>();
    if (j.contains("root_seed")) grid.root_seed = j.at("root_seed").get<std::uint64_t>();
    if (j.contains("densities") || j.contains("topologies")) grid.topologies.clear();
    if (j.contains("densities")) {
      for (double d : j.at("densities").get<std::vector<double>>()) grid.topologies.push_back(Topology::random_density(d));
    }
    if (j.contains("topologies")) {
      for (const auto& t : j.at("topologies").get<std::vector<std::string>>()) grid.topologies.push_back(Topology::parse(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid scenario grid field: ") + e.what());
  }
  grid.validate();
  return grid;
}

ScenarioGrid ScenarioGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void write_true_edges(std::ostream& out, const TrueNetwork& truth) {
  out << "i\tj\trho\n";
  for (const auto& [i, j] : truth.edges) {
    out << i + 1 << '\t' << j + 1 << '\t' << format_number(truth.pcor.rho(i, j)) << '\n';
  }
}

}  // namespace pcornet
