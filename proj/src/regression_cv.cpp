#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pcornet/error.hpp"
#include "pcornet/regression.hpp"

namespace pcornet {

namespace {

// Centered response and centered, unit-variance predictors of one training set.
struct Scaled {
  MatrixXd z;
  VectorXd y;
  VectorXd mean;
  VectorXd scale;
  double y_mean = 0.0;

  MatrixXd apply(const MatrixXd& other) const {
    MatrixXd out = other.rowwise() - mean.transpose();
    return out.array().rowwise() / scale.transpose().array();
  }
};

Scaled scale_training(const MatrixXd& z, const VectorXd& y) {
  if (z.rows() < 2) throw TooFewObservations("training set needs at least 2 observations");
  Scaled s;
  s.mean = z.colwise().mean().transpose();
  s.y_mean = y.mean();
  s.z = z.rowwise() - s.mean.transpose();
  s.y = y.array() - s.y_mean;
  s.scale.resize(z.cols());
  const double denom = static_cast<double>(z.rows() - 1);
  for (Index j = 0; j < z.cols(); ++j) {
    const double sd = std::sqrt(s.z.col(j).squaredNorm() / denom);
    // A constant column stays all zeros and receives a zero coefficient.
    s.scale(j) = sd > 0.0 ? sd : 1.0;
    s.z.col(j) /= s.scale(j);
  }
  return s;
}

void to_input_scale(RegressionFit& fit, const Scaled& s) {
  fit.coefficients = fit.coefficients.cwiseQuotient(s.scale);
  fit.intercept = s.y_mean - s.mean.dot(fit.coefficients);
}

// Pooled out-of-fold squared error per grid candidate. `predict(scaled, z_test, fold)`
// returns centered predictions, one column per candidate.
template <typename Predict>
VectorXd pooled_error(const MatrixXd& z, const VectorXd& y, const FoldAssignment& folds, Index candidates,
                      Predict&& predict) {
  if (folds.n() != z.rows() || z.rows() != y.size()) {
    throw DimensionError("fold assignment does not match the data");
  }
  VectorXd sse = VectorXd::Zero(candidates);
  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    if (test.empty()) continue;
    const Scaled s = scale_training(select_rows(z, train), select_rows(y, train));
    const MatrixXd z_test = s.apply(select_rows(z, test));
    const VectorXd y_test = select_rows(y, test).array() - s.y_mean;
    const MatrixXd pred = predict(s, z_test, f);
    sse += (pred.colwise() - y_test).colwise().squaredNorm().transpose();
  }
  return sse / static_cast<double>(z.rows());
}

// Index of the smallest error. Candidates are scanned from the preferred end so
// that only a strict improvement moves away from it.
Index best_index(const VectorXd& err, bool prefer_last) {
  const Index g = err.size();
  Index best = prefer_last ? g - 1 : 0;
  for (Index step = 1; step < g; ++step) {
    const Index i = prefer_last ? g - 1 - step : step;
    if (err(i) < err(best)) best = i;
  }
  return best;
}

MatrixXd ridge_predictions(const Scaled& s, const MatrixXd& z_test, const std::vector<double>& lambdas) {
  Eigen::BDCSVD<MatrixXd> svd(s.z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd sv = svd.singularValues();
  const VectorXd uy = svd.matrixU().transpose() * s.y;
  const MatrixXd a = z_test * svd.matrixV();
  MatrixXd pred(z_test.rows(), static_cast<Index>(lambdas.size()));
  VectorXd d(sv.size());
  for (std::size_t g = 0; g < lambdas.size(); ++g) {
    for (Index r = 0; r < sv.size(); ++r) {
      const double denom = sv(r) * sv(r) + lambdas[g];
      d(r) = denom > 0.0 ? sv(r) * uy(r) / denom : 0.0;
    }
    pred.col(static_cast<Index>(g)) = a * d;
  }
  return pred;
}

MatrixXd lasso_predictions(const MatrixXd& z_train, const VectorXd& y_train, const MatrixXd& z_test,
                           const std::vector<double>& fractions) {
  MatrixXd pred(z_test.rows(), static_cast<Index>(fractions.size()));
  if (z_train.cols() == 0) {
    pred.setZero();
    return pred;
  }
  const LassoPath path = lasso_path(z_train, y_train);
  MatrixXd knots(z_test.rows(), static_cast<Index>(path.betas.size()));
  for (std::size_t k = 0; k < path.betas.size(); ++k) knots.col(static_cast<Index>(k)) = z_test * path.betas[k];
  for (std::size_t g = 0; g < fractions.size(); ++g) {
    const auto [k, t] = path.locate_fraction(fractions[g]);
    const auto kk = static_cast<Index>(k);
    if (t == 0.0) {
      pred.col(static_cast<Index>(g)) = knots.col(kk);
    } else {
      pred.col(static_cast<Index>(g)) = (1.0 - t) * knots.col(kk) + t * knots.col(kk + 1);
    }
  }
  return pred;
}

PlsModel pls_model(const MatrixXd& z, const VectorXd& y, int m) {
  return z.cols() > z.rows() ? pls_dual(z, y, m, true) : pls_primal(z, y, m, true);
}

std::vector<int> usable_components(const TuningGrid& grid, int cap) {
  std::vector<int> out;
  for (int m : grid.pls_components) {
    if (m >= 1 && m <= cap) out.push_back(m);
  }
  if (out.empty()) throw RankExceeded("no PLS component count in the grid is attainable");
  return out;
}

MatrixXd pls_predictions(const Scaled& s, const MatrixXd& z_test, const std::vector<int>& components) {
  const PlsModel model = pls_model(s.z, s.y, components.back());
  const int attained = model.components();
  MatrixXd cumulative = MatrixXd::Zero(z_test.rows(), attained + 1);
  for (int k = 0; k < attained; ++k) {
    cumulative.col(k + 1) = cumulative.col(k) + (z_test * model.weights.col(k)) * model.score_response(k);
  }
  MatrixXd pred(z_test.rows(), static_cast<Index>(components.size()));
  for (std::size_t g = 0; g < components.size(); ++g) {
    pred.col(static_cast<Index>(g)) = cumulative.col(std::min(components[g], attained));
  }
  return pred;
}

VectorXd pls_coefficients(const MatrixXd& z, const VectorXd& y, int m) {
  const PlsModel model = pls_model(z, y, m);
  if (model.components() == 0) return VectorXd::Zero(z.cols());
  return model.coefficients(std::min(m, model.components()));
}

void require_nonempty(const TuningGrid& grid, RegressionMethod method) {
  const bool empty = (method == RegressionMethod::ridge && grid.ridge_lambda.empty()) ||
                     ((method == RegressionMethod::lasso || method == RegressionMethod::adalasso) &&
                      grid.lasso_fraction.empty()) ||
                     (method == RegressionMethod::pls && grid.pls_components.empty());
  if (empty) throw InvalidArgument("tuning grid for " + std::string(to_string(method)) + " is empty");
}

// Stage-1 weights on the standardized scale of `s`: 1/|b| or +inf when b = 0.
VectorXd adaptive_weights(const RegressionFit& stage1, const Scaled& s) {
  VectorXd w(stage1.coefficients.size());
  for (Index j = 0; j < w.size(); ++j) {
    const double b = stage1.coefficients(j) * s.scale(j);
    w(j) = b != 0.0 ? 1.0 / std::abs(b) : std::numeric_limits<double>::infinity();
  }
  return w;
}

}  // namespace

int pls_component_cap(Index n, int k, Index q) {
  if (k < 1) throw InvalidFolds("fold count must be positive");
  const Index held_out = (n + k - 1) / k;
  const Index cap = std::min<Index>({15, n - held_out - 1, q});
  return static_cast<int>(std::max<Index>(cap, 0));
}

RegressionFit cv_select(const MatrixXd& z, const VectorXd& y, RegressionMethod method, const TuningGrid& grid,
                        const FoldAssignment& folds) {
  require_nonempty(grid, method);
  if (method == RegressionMethod::adalasso) return fit_adaptive_lasso(z, y, folds, grid);

  const Scaled full = scale_training(z, y);
  RegressionFit fit;
  fit.method = method;
  switch (method) {
    case RegressionMethod::ridge: {
      const auto& lambdas = grid.ridge_lambda;
      const VectorXd err = pooled_error(z, y, folds, static_cast<Index>(lambdas.size()),
                                        [&](const Scaled& s, const MatrixXd& zt, int) {
                                          return ridge_predictions(s, zt, lambdas);
                                        });
      const Index best = best_index(err, true);
      fit = fit_ridge(full.z, full.y, lambdas[static_cast<std::size_t>(best)]);
      fit.cv_error = err(best);
      break;
    }
    case RegressionMethod::lasso: {
      const auto& fractions = grid.lasso_fraction;
      const VectorXd err = pooled_error(z, y, folds, static_cast<Index>(fractions.size()),
                                        [&](const Scaled& s, const MatrixXd& zt, int) {
                                          return lasso_predictions(s.z, s.y, zt, fractions);
                                        });
      const Index best = best_index(err, false);
      fit = fit_lasso(full.z, full.y, fractions[static_cast<std::size_t>(best)]);
      fit.cv_error = err(best);
      break;
    }
    case RegressionMethod::pls: {
      const auto components = usable_components(grid, pls_component_cap(z.rows(), folds.k, z.cols()));
      const VectorXd err = pooled_error(z, y, folds, static_cast<Index>(components.size()),
                                        [&](const Scaled& s, const MatrixXd& zt, int) {
                                          return pls_predictions(s, zt, components);
                                        });
      const Index best = best_index(err, false);
      const int m = components[static_cast<std::size_t>(best)];
      fit.method = RegressionMethod::pls;
      fit.tuning = m;
      fit.coefficients = pls_coefficients(full.z, full.y, m);
      fit.cv_error = err(best);
      break;
    }
    case RegressionMethod::adalasso:
      break;
  }
  to_input_scale(fit, full);
  return fit;
}

AdaptiveLassoResult fit_adaptive_lasso_detailed(const MatrixXd& z, const VectorXd& y, const FoldAssignment& folds,
                                                const TuningGrid& grid) {
  require_nonempty(grid, RegressionMethod::adalasso);
  AdaptiveLassoResult out;
  out.stage1 = cv_select(z, y, RegressionMethod::lasso, grid, folds);
  const Scaled full = scale_training(z, y);
  out.weights = adaptive_weights(out.stage1, full);

  const auto& fractions = grid.lasso_fraction;
  RegressionFit& fit = out.fit;
  fit.method = RegressionMethod::adalasso;
  if (!out.weights.array().isFinite().any()) {
    fit.coefficients = VectorXd::Zero(z.cols());
    fit.intercept = full.y_mean;
    fit.tuning = 0.0;
    fit.cv_error = out.stage1.cv_error;
    return out;
  }

  const VectorXd err = pooled_error(
      z, y, folds, static_cast<Index>(fractions.size()), [&](const Scaled& s, const MatrixXd& zt, int f) {
        // Weights are rebuilt from the outer training set alone.
        const auto train = folds.train_indices(f);
        const MatrixXd z_train = select_rows(z, train);
        const VectorXd y_train = select_rows(y, train);
        const int inner_k = std::min<int>(folds.k, static_cast<int>(train.size()));
        const FoldAssignment inner =
            make_folds(static_cast<Index>(train.size()), inner_k, folds.seed + static_cast<std::uint64_t>(f) + 1);
        const RegressionFit stage1 = cv_select(z_train, y_train, RegressionMethod::lasso, grid, inner);
        const VectorXd w = adaptive_weights(stage1, s);
        std::vector<Index> kept;
        for (Index j = 0; j < w.size(); ++j) {
          if (std::isfinite(w(j))) kept.push_back(j);
        }
        MatrixXd design(s.z.rows(), static_cast<Index>(kept.size()));
        MatrixXd design_test(zt.rows(), static_cast<Index>(kept.size()));
        for (std::size_t c = 0; c < kept.size(); ++c) {
          design.col(static_cast<Index>(c)) = s.z.col(kept[c]) / w(kept[c]);
          design_test.col(static_cast<Index>(c)) = zt.col(kept[c]) / w(kept[c]);
        }
        return lasso_predictions(design, s.y, design_test, fractions);
      });
  const Index best = best_index(err, false);
  fit = fit_weighted_lasso(full.z, full.y, out.weights, fractions[static_cast<std::size_t>(best)]);
  fit.method = RegressionMethod::adalasso;
  fit.cv_error = err(best);
  to_input_scale(fit, full);
  return out;
}

RegressionFit fit_adaptive_lasso(const MatrixXd& z, const VectorXd& y, const FoldAssignment& folds,
                                 const TuningGrid& grid) {
  return fit_adaptive_lasso_detailed(z, y, folds, grid).fit;
}

}  // namespace pcornet
