#include <cmath>

#include "pcornet/error.hpp"
#include "pcornet/regression.hpp"

namespace pcornet {

std::string_view to_string(RegressionMethod m) {
  switch (m) {
    case RegressionMethod::ridge: return "ridge";
    case RegressionMethod::lasso: return "lasso";
    case RegressionMethod::adalasso: return "adalasso";
    case RegressionMethod::pls: return "pls";
  }
  return "unknown";
}

TuningGrid TuningGrid::standard(Index n, Index p) {
  constexpr int kPoints = 1000;
  TuningGrid grid;
  grid.ridge_lambda.reserve(kPoints);
  grid.lasso_fraction.reserve(kPoints);
  const double scale = static_cast<double>(n) * static_cast<double>(p);
  for (int s = 0; s < kPoints; ++s) {
    const double exponent = -10.0 + 9.0 * s / (kPoints - 1);
    grid.ridge_lambda.push_back(std::pow(10.0, exponent) * scale);
    grid.lasso_fraction.push_back(static_cast<double>(s) / (kPoints - 1));
  }
  for (int m = 1; m <= 15; ++m) grid.pls_components.push_back(m);
  return grid;
}

VectorXd ridge_primal(const MatrixXd& z, const VectorXd& y, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("ridge penalty must be nonnegative");
  MatrixXd gram = z.transpose() * z;
  gram.diagonal().array() += lambda;
  Eigen::LLT<MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularSystem("ridge normal equations are singular");
  VectorXd beta = llt.solve(z.transpose() * y);
  if (!beta.allFinite()) throw SingularSystem("ridge normal equations are singular");
  return beta;
}

VectorXd ridge_dual(const MatrixXd& z, const VectorXd& y, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("ridge penalty must be nonnegative");
  MatrixXd kernel = z * z.transpose();
  kernel.diagonal().array() += lambda;
  Eigen::LLT<MatrixXd> llt(kernel);
  if (llt.info() != Eigen::Success) throw SingularSystem("ridge kernel system is singular");
  VectorXd alpha = llt.solve(y);
  if (!alpha.allFinite()) throw SingularSystem("ridge kernel system is singular");
  return z.transpose() * alpha;
}

RegressionFit fit_ridge(const MatrixXd& z, const VectorXd& y, double lambda) {
  if (z.rows() != y.size()) throw DimensionError("design and response lengths differ");
  if (lambda == 0.0 && z.cols() >= z.rows()) {
    throw SingularSystem("unpenalized least squares needs more observations than predictors");
  }
  RegressionFit fit;
  fit.method = RegressionMethod::ridge;
  fit.tuning = lambda;
  if (lambda == 0.0) {
    // Plain least squares; reject numerically rank-deficient designs.
    Eigen::ColPivHouseholderQR<MatrixXd> qr(z);
    if (qr.rank() < z.cols()) throw SingularSystem("design matrix is rank deficient");
    fit.coefficients = ridge_primal(z, y, 0.0);
  } else if (z.cols() > z.rows()) {
    fit.coefficients = ridge_dual(z, y, lambda);
  } else {
    fit.coefficients = ridge_primal(z, y, lambda);
  }
  return fit;
}

}  // namespace pcornet
