#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcornet/dataset.hpp"
#include "pcornet/parallel.hpp"
#include "pcornet/regression.hpp"

namespace pcornet {

enum class Method { shrink, pls, ridge, lasso, adalasso };

std::string_view to_string(Method m);
/// Parses "shrink", "pls", "ridge", "lasso" or "adalasso"; throws InvalidArgument.
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();
/// Lasso-type methods select edges through exact zeros rather than fdr testing.
bool is_sparse(Method m);
std::optional<RegressionMethod> regression_method(Method m);

/// Symmetric p x p matrix with unit diagonal and entries in [-1, 1].
struct PartialCorrelationMatrix {
  MatrixXd rho;
  Method method = Method::shrink;

  Index p() const { return rho.rows(); }
};

/// Combines the p directional regressions: rho_ij = sign(b_ij) min(1, sqrt(b_ij b_ji))
/// when both coefficients share a sign, 0 otherwise. Fits are matched to genes
/// by response_index; a missing or duplicated gene throws IncompleteFits.
PartialCorrelationMatrix pcor_from_regressions(const std::vector<RegressionFit>& fits, Index p,
                                               Method method = Method::ridge);

/// rho_ij = -w_ij / sqrt(w_ii w_jj). Throws InvalidPrecision on a non-positive diagonal entry.
PartialCorrelationMatrix pcor_from_precision(const MatrixXd& omega, Method method = Method::shrink);

struct ShrinkageEstimate {
  MatrixXd sigma;
  double lambda = 0.0;
  std::string target = "identity-correlation";
};

/// Sample correlations shrunk toward zero by the analytic intensity
/// lambda* = clamp(sum Var(r_ij) / sum r_ij^2) over i < j, recombined with the
/// unshrunk sample standard deviations. `lambda` overrides the estimate.
ShrinkageEstimate shrinkage_covariance(const ExpressionMatrix& x, std::optional<double> lambda = std::nullopt,
                                       Execution execution = Execution::parallel);

/// Numerator and denominator of lambda*, summed over pairs i < j of the
/// standardized columns of `xs`.
struct ShrinkageSums {
  double variance = 0.0;
  double squared = 0.0;
};
ShrinkageSums shrinkage_sums(const MatrixXd& xs, Execution execution);

struct EstimateOptions {
  int k = 5;
  std::uint64_t seed = 0;
  bool standardize = true;
  Execution execution = Execution::parallel;
  /// Defaults to TuningGrid::standard(n, p).
  std::optional<TuningGrid> grid;
};

struct NetworkEstimate {
  PartialCorrelationMatrix pcor;
  std::vector<RegressionFit> fits;  // empty for shrink
  double shrinkage_lambda = std::numeric_limits<double>::quiet_NaN();
};

/// Centers (and optionally standardizes) X, then either regresses every gene
/// on the others with per-gene cross-validation or inverts the shrinkage
/// covariance. Per-gene folds are seeded from (seed, gene index), so results do
/// not depend on the number of workers.
NetworkEstimate estimate_network(const ExpressionMatrix& x, Method method, const EstimateOptions& options);
PartialCorrelationMatrix estimate_network_matrix(const ExpressionMatrix& x, Method method, int k,
                                                 std::uint64_t seed,
                                                 Execution execution = Execution::parallel);

/// Folds used for the regression of gene i.
FoldAssignment gene_folds(Index n, int k, std::uint64_t seed, Index gene);

// ---------------------------------------------------------------------------
// Edge sets over unordered gene pairs.

struct Edge {
  Index i = 0;
  Index j = 0;
  double rho = 0.0;
  double local_fdr = std::numeric_limits<double>::quiet_NaN();
};

struct Network {
  Index p = 0;
  std::vector<Edge> edges;  // i < j, sorted by (i, j)
};

inline std::size_t pair_count(Index p) { return static_cast<std::size_t>(p * (p - 1) / 2); }
/// Position of pair (i, j), i < j, in row-major upper-triangle order.
std::size_t pair_index(Index i, Index j, Index p);
/// Off-diagonal upper-triangle entries in row-major order.
std::vector<double> upper_triangle(const MatrixXd& m);

/// Edges at the nonzero entries of the matrix.
Network nonzero_network(const PartialCorrelationMatrix& pcor);

void write_pcor_csv(std::ostream& out, const PartialCorrelationMatrix& pcor, const std::vector<std::string>& labels);
/// Tab-separated "gene_i gene_j rho [local_fdr]" with a header row.
void write_edge_list(std::ostream& out, const Network& network, const std::vector<std::string>& labels);

}  // namespace pcornet
