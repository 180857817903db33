#include <gtest/gtest.h>

#include "pcornet/error.hpp"
#include "pcornet/regression.hpp"
#include "oracles.hpp"

using namespace pcornet;

namespace {

int support_size(const VectorXd& b) { return static_cast<int>((b.array() != 0.0).count()); }

}  // namespace

TEST(CrossValidation, NoiseResponsePicksStrongRidgePenalty) {
  const Index n = 30, q = 20;
  const auto grid = TuningGrid::standard(n, q + 1);
  const double median = grid.ridge_lambda[grid.ridge_lambda.size() / 2];
  int upper = 0;
  for (int run = 0; run < 50; ++run) {
    Rng rng(derive_seed(100, {static_cast<std::uint64_t>(run)}));
    const MatrixXd z = oracle::gaussian_matrix(n, q, rng);
    const VectorXd y = oracle::gaussian_vector(n, rng);
    const auto fit = cv_select(z, y, RegressionMethod::ridge, grid, make_folds(n, 5, run));
    if (fit.tuning >= median) ++upper;
  }
  EXPECT_GE(upper, 40);
}

TEST(CrossValidation, LinearResponseKeepsTruePredictor) {
  const Index n = 100, q = 5;
  const auto grid = TuningGrid::standard(n, q + 1);
  for (int run = 0; run < 20; ++run) {
    Rng rng(derive_seed(200, {static_cast<std::uint64_t>(run)}));
    const MatrixXd z = oracle::gaussian_matrix(n, q, rng);
    const VectorXd y = 1.5 * z.col(2);
    const auto fit = cv_select(z, y, RegressionMethod::lasso, grid, make_folds(n, 5, run));
    EXPECT_GT(fit.tuning, 0.0);
    EXPECT_NE(fit.coefficients(2), 0.0);
  }
}

TEST(CrossValidation, SinglePointGrid) {
  Rng rng(41);
  const MatrixXd z = oracle::gaussian_matrix(20, 4, rng);
  const VectorXd y = oracle::gaussian_vector(20, rng);
  const auto folds = make_folds(20, 5, 1);
  TuningGrid grid{{3.25}, {0.4}, {2}};
  EXPECT_EQ(cv_select(z, y, RegressionMethod::ridge, grid, folds).tuning, 3.25);
  EXPECT_EQ(cv_select(z, y, RegressionMethod::lasso, grid, folds).tuning, 0.4);
  EXPECT_EQ(cv_select(z, y, RegressionMethod::pls, grid, folds).tuning, 2.0);
}

TEST(CrossValidation, EmptyGridRejected) {
  Rng rng(42);
  const MatrixXd z = oracle::gaussian_matrix(20, 4, rng);
  const VectorXd y = oracle::gaussian_vector(20, rng);
  TuningGrid grid{{}, {}, {}};
  EXPECT_THROW(cv_select(z, y, RegressionMethod::ridge, grid, make_folds(20, 5, 1)), InvalidArgument);
}

TEST(CrossValidation, PlsRespectsComponentCap) {
  Rng rng(43);
  const MatrixXd z = oracle::gaussian_matrix(12, 30, rng);
  const VectorXd y = z.col(0) + z.col(1) + oracle::gaussian_vector(12, rng);
  const auto fit = cv_select(z, y, RegressionMethod::pls, TuningGrid::standard(12, 31), make_folds(12, 4, 3));
  EXPECT_GE(fit.tuning, 1.0);
  EXPECT_LE(fit.tuning, pls_component_cap(12, 4, 30));
  EXPECT_TRUE(std::isfinite(fit.cv_error));
}

TEST(CrossValidation, RidgeCoefficientsOnInputScale) {
  Rng rng(44);
  MatrixXd z = oracle::gaussian_matrix(40, 3, rng);
  z.col(1) *= 100.0;
  const VectorXd y = z.col(1) / 100.0 + 0.1 * oracle::gaussian_vector(40, rng);
  const auto fit = cv_select(z, y, RegressionMethod::ridge, TuningGrid::standard(40, 4), make_folds(40, 5, 2));
  EXPECT_NEAR(fit.coefficients(1), 0.01, 1e-3);
}

TEST(AdaptiveLasso, ZeroStageOneGivesZero) {
  Rng rng(45);
  const MatrixXd z = oracle::gaussian_matrix(20, 8, rng);
  const VectorXd y = VectorXd::Zero(20);
  const auto res = fit_adaptive_lasso_detailed(z, y, make_folds(20, 5, 1), TuningGrid::standard(20, 9));
  EXPECT_TRUE(res.stage1.coefficients.isZero(0.0));
  EXPECT_TRUE(res.fit.coefficients.isZero(0.0));
}

TEST(AdaptiveLasso, SupportInsideStageOne) {
  const auto grid = TuningGrid::standard(20, 9);
  for (int run = 0; run < 20; ++run) {
    Rng rng(derive_seed(300, {static_cast<std::uint64_t>(run)}));
    const MatrixXd z = oracle::gaussian_matrix(20, 8, rng);
    const VectorXd y = z.col(1) - z.col(4) + 0.5 * oracle::gaussian_vector(20, rng);
    const auto folds = make_folds(20, 5, run);
    const auto res = fit_adaptive_lasso_detailed(z, y, folds, grid);
    const auto lasso = cv_select(z, y, RegressionMethod::lasso, grid, folds);
    EXPECT_LT((res.stage1.coefficients - lasso.coefficients).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(support_size(res.fit.coefficients), support_size(lasso.coefficients));
    for (Index j = 0; j < 8; ++j) {
      if (res.fit.coefficients(j) != 0.0) EXPECT_NE(res.stage1.coefficients(j), 0.0);
      if (res.stage1.coefficients(j) == 0.0) EXPECT_TRUE(std::isinf(res.weights(j)));
    }
  }
}

TEST(AdaptiveLasso, WeightsAreInverseStageOneOnStandardizedScale) {
  Rng rng(46);
  const MatrixXd z = oracle::gaussian_matrix(30, 5, rng);
  const VectorXd y = z.col(0) + 0.5 * z.col(3) + 0.3 * oracle::gaussian_vector(30, rng);
  const auto res = fit_adaptive_lasso_detailed(z, y, make_folds(30, 5, 9), TuningGrid::standard(30, 6));
  const VectorXd centered_sd =
      ((z.rowwise() - z.colwise().mean()).colwise().squaredNorm() / 29.0).cwiseSqrt().transpose();
  for (Index j = 0; j < 5; ++j) {
    const double b = res.stage1.coefficients(j);
    if (b != 0.0) EXPECT_NEAR(res.weights(j), 1.0 / std::abs(b * centered_sd(j)), 1e-9 * res.weights(j));
  }
}
