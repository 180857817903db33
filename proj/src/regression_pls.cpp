#include <cmath>
#include <string>

#include "pcornet/error.hpp"
#include "pcornet/regression.hpp"

namespace pcornet {

namespace {

constexpr double kExhausted = 1e-8;

void check_request(const MatrixXd& z, const VectorXd& y, int m) {
  if (z.rows() != y.size()) throw DimensionError("design and response lengths differ");
  if (m < 1) throw InvalidArgument("PLS needs at least one component");
}

[[noreturn]] void rank_exceeded(int requested, int attained) {
  throw RankExceeded("requested " + std::to_string(requested) + " PLS components but only " +
                     std::to_string(attained) + " are attainable");
}

PlsModel allocate(Index n, Index p, int m) {
  PlsModel model;
  model.unit_weights.resize(p, m);
  model.weights.resize(p, m);
  model.scores.resize(n, m);
  model.score_response.resize(m);
  return model;
}

void shrink_to(PlsModel& model, int k) {
  model.unit_weights.conservativeResize(Eigen::NoChange, k);
  model.weights.conservativeResize(Eigen::NoChange, k);
  model.scores.conservativeResize(Eigen::NoChange, k);
  model.score_response.conservativeResize(k);
}

}  // namespace

VectorXd PlsModel::coefficients(int m) const {
  if (m < 1) throw InvalidArgument("PLS needs at least one component");
  if (m > components()) rank_exceeded(m, components());
  return weights.leftCols(m) * score_response.head(m);
}

PlsModel pls_primal(const MatrixXd& z, const VectorXd& y, int m, bool truncate) {
  check_request(z, y, m);
  const Index n = z.rows();
  const Index p = z.cols();
  PlsModel model = allocate(n, p, m);
  const VectorXd zy = z.transpose() * y;
  const double scale = zy.norm();
  // Orthonormal basis of span{Z' t_l}; new weights are kept orthogonal to it.
  MatrixXd basis(p, m);

  for (int k = 0; k < m; ++k) {
    VectorXd u = zy;
    for (int pass = 0; pass < 2; ++pass) u -= basis.leftCols(k) * (basis.leftCols(k).transpose() * u);
    const double norm = u.norm();
    if (!(scale > 0.0) || norm <= kExhausted * scale) {
      if (!truncate) rank_exceeded(m, k);
      shrink_to(model, k);
      return model;
    }
    const VectorXd w = u / norm;
    VectorXd t = z * w;
    const double tn = t.norm();
    t /= tn;
    model.unit_weights.col(k) = w;
    model.weights.col(k) = w / tn;
    model.scores.col(k) = t;
    model.score_response(k) = t.dot(y);

    VectorXd v = z.transpose() * t;
    for (int pass = 0; pass < 2; ++pass) v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
    basis.col(k) = v / v.norm();
  }
  return model;
}

PlsModel pls_dual(const MatrixXd& z, const VectorXd& y, int m, bool truncate) {
  check_request(z, y, m);
  const Index n = z.rows();
  const Index p = z.cols();
  PlsModel model = allocate(n, p, m);
  const MatrixXd kernel = z * z.transpose();
  const double scale = std::sqrt(std::max(0.0, y.dot(kernel * y)));
  // Scores orthonormal in the kernel inner product, together with K times them.
  MatrixXd kbasis_raw(n, m);
  MatrixXd kbasis(n, m);

  for (int k = 0; k < m; ++k) {
    VectorXd a = y;
    for (int pass = 0; pass < 2; ++pass) a -= kbasis_raw.leftCols(k) * (kbasis.leftCols(k).transpose() * a);
    const VectorXd ka = kernel * a;
    const double wnorm = std::sqrt(std::max(0.0, a.dot(ka)));
    if (!(scale > 0.0) || wnorm <= kExhausted * scale) {
      if (!truncate) rank_exceeded(m, k);
      shrink_to(model, k);
      return model;
    }
    const double tn = ka.norm();
    const VectorXd t = ka / tn;
    const VectorXd w = z.transpose() * a;
    model.unit_weights.col(k) = w / wnorm;
    model.weights.col(k) = w / tn;
    model.scores.col(k) = t;
    model.score_response(k) = t.dot(y);

    VectorXd b = t;
    for (int pass = 0; pass < 2; ++pass) b -= kbasis_raw.leftCols(k) * (kbasis.leftCols(k).transpose() * b);
    VectorXd kb = kernel * b;
    const double bk = std::sqrt(std::max(b.dot(kb), 0.0));
    kbasis_raw.col(k) = b / bk;
    kbasis.col(k) = kb / bk;
  }
  return model;
}

RegressionFit fit_pls(const MatrixXd& z, const VectorXd& y, int m) {
  check_request(z, y, m);
  const PlsModel model = z.cols() > z.rows() ? pls_dual(z, y, m) : pls_primal(z, y, m);
  RegressionFit fit;
  fit.method = RegressionMethod::pls;
  fit.tuning = m;
  fit.coefficients = model.coefficients(m);
  return fit;
}

}  // namespace pcornet
