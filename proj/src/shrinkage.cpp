#include <algorithm>
#include <cmath>

#include "pcornet/error.hpp"
#include "pcornet/ggm.hpp"

namespace pcornet {

namespace {

// Contributions of the pairs (i, j), j > i. The per-observation products
// w_k = x_ki x_kj are accumulated in two passes (mean, then spread).
ShrinkageSums row_sums(const MatrixXd& xs, Index i) {
  const Index n = xs.rows();
  const double nd = static_cast<double>(n);
  const double var_scale = nd / std::pow(nd - 1.0, 3);
  const double r_scale = nd / (nd - 1.0);
  ShrinkageSums s;
  const auto xi = xs.col(i);
  for (Index j = i + 1; j < xs.cols(); ++j) {
    const auto xj = xs.col(j);
    const double mean = xi.dot(xj) / nd;
    double spread = 0.0;
    for (Index k = 0; k < n; ++k) {
      const double d = xi(k) * xj(k) - mean;
      spread += d * d;
    }
    const double r = r_scale * mean;
    s.variance += var_scale * spread;
    s.squared += r * r;
  }
  return s;
}

}  // namespace

ShrinkageSums shrinkage_sums(const MatrixXd& xs, Execution execution) {
  const Index p = xs.cols();
  std::vector<ShrinkageSums> rows(static_cast<std::size_t>(p));
  parallel_for(p, execution, [&](std::ptrdiff_t i) { rows[static_cast<std::size_t>(i)] = row_sums(xs, i); });
  ShrinkageSums total;
  for (const auto& r : rows) {
    total.variance += r.variance;
    total.squared += r.squared;
  }
  return total;
}

ShrinkageEstimate shrinkage_covariance(const ExpressionMatrix& x, std::optional<double> lambda, Execution execution) {
  if (x.n() < 3) throw TooFewObservations("shrinkage needs at least 3 observations");
  if (lambda && !(*lambda >= 0.0 && *lambda <= 1.0)) {
    throw InvalidArgument("shrinkage intensity must lie in [0, 1]");
  }
  require_nonconstant(x);
  const Index n = x.n();
  const Index p = x.p();
  MatrixXd xs = x.values.rowwise() - x.values.colwise().mean();
  VectorXd sd(p);
  for (Index j = 0; j < p; ++j) {
    sd(j) = std::sqrt(xs.col(j).squaredNorm() / static_cast<double>(n - 1));
    xs.col(j) /= sd(j);
  }

  ShrinkageEstimate est;
  if (lambda) {
    est.lambda = *lambda;
  } else {
    const ShrinkageSums sums = shrinkage_sums(xs, execution);
    est.lambda = sums.squared > 0.0 ? std::clamp(sums.variance / sums.squared, 0.0, 1.0) : 1.0;
  }

  MatrixXd r = xs.transpose() * xs / static_cast<double>(n - 1);
  r = 0.5 * (r + r.transpose()).eval();
  r *= 1.0 - est.lambda;
  r.diagonal().setOnes();
  est.sigma = sd.asDiagonal() * r * sd.asDiagonal();
  return est;
}

}  // namespace pcornet
