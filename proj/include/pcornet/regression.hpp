#pragma once

#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pcornet/dataset.hpp"

namespace pcornet {

enum class RegressionMethod { ridge, lasso, adalasso, pls };

std::string_view to_string(RegressionMethod m);

/// Coefficients of one response gene regressed on the remaining genes. The
/// coefficient vector is indexed by the remaining genes in their original
/// order (gene j maps to slot j for j < i and j - 1 for j > i).
struct RegressionFit {
  Index response_index = -1;
  VectorXd coefficients;
  double intercept = 0.0;
  RegressionMethod method = RegressionMethod::ridge;
  /// lambda for ridge, l1 fraction s for (adaptive) lasso, component count for pls.
  double tuning = 0.0;
  /// Penalty level of the equivalent lambda-form problem, lasso family only.
  double penalty = std::numeric_limits<double>::quiet_NaN();
  double cv_error = std::numeric_limits<double>::quiet_NaN();
};

struct TuningGrid {
  std::vector<double> ridge_lambda;    // strictly increasing
  std::vector<double> lasso_fraction;  // strictly increasing, in [0, 1]
  std::vector<int> pls_components;     // strictly increasing

  /// 1000 ridge penalties l * n * p with l log-spaced on [1e-10, 1e-1], 1000
  /// equidistant lasso fractions on [0, 1] and 1..15 PLS components.
  static TuningGrid standard(Index n, Index p);
};

// ---------------------------------------------------------------------------
// Ridge: minimizes ||y - Z b||^2 + lambda ||b||^2.

/// (Z'Z + lambda I)^-1 Z'y, cost driven by the predictor count.
VectorXd ridge_primal(const MatrixXd& z, const VectorXd& y, double lambda);
/// Z'(ZZ' + lambda I)^-1 y, cost driven by the observation count.
VectorXd ridge_dual(const MatrixXd& z, const VectorXd& y, double lambda);
/// Picks the dual form when predictors outnumber observations. Throws
/// SingularSystem for lambda == 0 with p >= n.
RegressionFit fit_ridge(const MatrixXd& z, const VectorXd& y, double lambda);

// ---------------------------------------------------------------------------
// Lasso: minimizes 0.5 ||y - Z b||^2 + lambda sum_j w_j |b_j|.

/// Piecewise-linear solution path from lambda_max down to 0 (homotopy).
/// Knot 0 is lambda_max with b = 0; the l1 norm is nondecreasing along it.
struct LassoPath {
  std::vector<double> lambdas;
  std::vector<VectorXd> betas;
  std::vector<double> l1_norms;

  double max_l1() const { return l1_norms.empty() ? 0.0 : l1_norms.back(); }
  /// Solution whose l1 norm is s * max_l1().
  VectorXd at_fraction(double s) const;
  double lambda_at_fraction(double s) const;
  /// Index k and weight t such that the fraction point is (1-t) knot k + t knot k+1.
  std::pair<std::size_t, double> locate_fraction(double s) const;
};

LassoPath lasso_path(const MatrixXd& z, const VectorXd& y);

struct CoordinateDescentResult {
  VectorXd beta;
  int sweeps = 0;
  double duality_gap = 0.0;
  bool converged = false;
};

/// Cyclic coordinate descent with optional per-coordinate penalty weights
/// (empty = all ones). Stops when the largest change |delta b_j| * ||z_j||^2
/// in a full sweep is below `tol`.
CoordinateDescentResult lasso_coordinate_descent(const MatrixXd& z, const VectorXd& y, double lambda,
                                                 const VectorXd& weights = {}, const VectorXd& warm_start = {},
                                                 double tol = 1e-7, int max_sweeps = 100000);

double lasso_duality_gap(const MatrixXd& z, const VectorXd& y, const VectorXd& beta, double lambda,
                         const VectorXd& weights = {});

/// Lasso at l1 fraction s of the path end (the least-l1-norm least squares
/// solution). s = 0 returns exact zeros. Throws ConvergenceError.
RegressionFit fit_lasso(const MatrixXd& z, const VectorXd& y, double s);

/// Weighted lasso at fraction s. Infinite weights exclude a predictor; the
/// fraction refers to the path of the reweighted design Z_j / w_j.
RegressionFit fit_weighted_lasso(const MatrixXd& z, const VectorXd& y, const VectorXd& weights, double s);

// ---------------------------------------------------------------------------
// PLS with one response.

struct PlsModel {
  /// Unit-norm weight vectors as extracted (columns).
  MatrixXd unit_weights;
  /// Weights rescaled so that every score t_k = Z w_k has length 1.
  MatrixXd weights;
  /// Orthonormal score vectors t_k (columns).
  MatrixXd scores;
  /// t_k' y.
  VectorXd score_response;

  int components() const { return static_cast<int>(weights.cols()); }
  /// (w_1, ..., w_m) T_m' y.
  VectorXd coefficients(int m) const;
};

/// Components maximize squared covariance with y subject to mutually
/// orthogonal scores. With `truncate` the model stops early when the Krylov
/// space is exhausted instead of throwing RankExceeded.
PlsModel pls_primal(const MatrixXd& z, const VectorXd& y, int m, bool truncate = false);
/// Kernel form working on the n x n Gram matrix ZZ'.
PlsModel pls_dual(const MatrixXd& z, const VectorXd& y, int m, bool truncate = false);
/// Dual form when p > n. Throws RankExceeded if m exceeds the attainable rank.
RegressionFit fit_pls(const MatrixXd& z, const VectorXd& y, int m);

// ---------------------------------------------------------------------------
// Cross-validated selection. Each training set is centered and its predictors
// scaled to unit variance; coefficients are mapped back to the input scale.

/// Fit at the grid point with the smallest pooled out-of-fold squared error.
/// Ties go to the stronger regularization.
RegressionFit cv_select(const MatrixXd& z, const VectorXd& y, RegressionMethod method, const TuningGrid& grid,
                        const FoldAssignment& folds);

struct AdaptiveLassoResult {
  RegressionFit stage1;  // CV-selected lasso that generated the weights
  RegressionFit fit;     // CV-selected weighted lasso
  VectorXd weights;      // on the standardized scale; +inf for excluded predictors
};

/// Two-stage adaptive lasso with weights 1/|b_lasso| and the weight
/// construction repeated inside every outer fold.
AdaptiveLassoResult fit_adaptive_lasso_detailed(const MatrixXd& z, const VectorXd& y, const FoldAssignment& folds,
                                                const TuningGrid& grid);
RegressionFit fit_adaptive_lasso(const MatrixXd& z, const VectorXd& y, const FoldAssignment& folds,
                                 const TuningGrid& grid);

/// Largest usable PLS component count for n observations, k folds and q
/// predictors: min(15, n - ceil(n/k) - 1, q).
int pls_component_cap(Index n, int k, Index q);

}  // namespace pcornet
