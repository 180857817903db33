#include <algorithm>
#include <cmath>
#include <limits>

#include "pcornet/error.hpp"
#include "pcornet/regression.hpp"

namespace pcornet {

namespace {

enum class Membership : char { inactive, active, excluded };

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Lower Cholesky factor of the active Gram matrix, grown one column at a time.
class ActiveCholesky {
public:
  ActiveCholesky(const MatrixXd& z, Index capacity) : z_(z), l_(capacity, capacity) {}

  Index size() const { return static_cast<Index>(cols_.size()); }
  const std::vector<Index>& columns() const { return cols_; }

  bool append(Index j) {
    const Index k = size();
    if (k >= l_.rows()) return false;
    const double norm2 = z_.col(j).squaredNorm();
    if (norm2 <= 0.0) return false;
    VectorXd g(k);
    for (Index i = 0; i < k; ++i) g(i) = z_.col(cols_[static_cast<std::size_t>(i)]).dot(z_.col(j));
    VectorXd l = l_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(g);
    const double d2 = norm2 - l.squaredNorm();
    if (d2 <= 1e-10 * norm2) return false;
    l_.row(k).head(k) = l.transpose();
    l_(k, k) = std::sqrt(d2);
    cols_.push_back(j);
    return true;
  }

  void remove(Index j) {
    std::vector<Index> keep;
    for (Index c : cols_) {
      if (c != j) keep.push_back(c);
    }
    cols_.clear();
    for (Index c : keep) append(c);
  }

  VectorXd solve(const VectorXd& rhs) const {
    const Index k = size();
    VectorXd x = l_.topLeftCorner(k, k).triangularView<Eigen::Lower>().solve(rhs);
    return l_.topLeftCorner(k, k).transpose().triangularView<Eigen::Upper>().solve(x);
  }

private:
  const MatrixXd& z_;
  MatrixXd l_;
  std::vector<Index> cols_;
};

VectorXd finite_weights_or_ones(const VectorXd& weights, Index p) {
  if (weights.size() == 0) return VectorXd::Ones(p);
  if (weights.size() != p) throw DimensionError("penalty weight count differs from predictor count");
  return weights;
}

}  // namespace

LassoPath lasso_path(const MatrixXd& z, const VectorXd& y) {
  if (z.rows() != y.size()) throw DimensionError("design and response lengths differ");
  const Index n = z.rows();
  const Index p = z.cols();
  LassoPath path;
  VectorXd beta = VectorXd::Zero(p);
  VectorXd corr = z.transpose() * y;

  auto push_knot = [&](double lambda) {
    path.lambdas.push_back(lambda);
    path.betas.push_back(beta);
    path.l1_norms.push_back(beta.lpNorm<1>());
  };

  if (p == 0) {
    push_knot(0.0);
    return path;
  }
  Index first = 0;
  double lambda = corr.cwiseAbs().maxCoeff(&first);
  push_knot(lambda);
  if (!(lambda > 0.0)) {
    path.lambdas.back() = 0.0;
    return path;
  }

  const double lambda0 = lambda;
  const double eps = 1e-12 * lambda0;
  std::vector<Membership> state(static_cast<std::size_t>(p), Membership::inactive);
  VectorXd sign = VectorXd::Zero(p);
  ActiveCholesky chol(z, std::min(n, p));

  auto add = [&](Index j) {
    if (chol.append(j)) {
      state[static_cast<std::size_t>(j)] = Membership::active;
      sign(j) = corr(j) >= 0.0 ? 1.0 : -1.0;
    } else {
      state[static_cast<std::size_t>(j)] = Membership::excluded;
    }
  };
  add(first);

  Index just_dropped = -1;
  const int max_steps = static_cast<int>(8 * (n + p) + 16);
  for (int step = 0; step < max_steps; ++step) {
    const auto& active = chol.columns();
    const Index k = chol.size();
    if (k == 0) break;
    VectorXd s(k);
    for (Index i = 0; i < k; ++i) s(i) = sign(active[static_cast<std::size_t>(i)]);
    const VectorXd d = chol.solve(s);
    VectorXd u = VectorXd::Zero(n);
    for (Index i = 0; i < k; ++i) u += d(i) * z.col(active[static_cast<std::size_t>(i)]);
    const VectorXd a = z.transpose() * u;

    enum class Event { finish, add, drop } event = Event::finish;
    double gamma = lambda;
    Index who = -1;
    for (Index j = 0; j < p; ++j) {
      if (state[static_cast<std::size_t>(j)] != Membership::inactive) continue;
      for (double sgn : {1.0, -1.0}) {
        const double denom = 1.0 - sgn * a(j);
        if (denom <= 1e-12) continue;
        const double cand = std::max(0.0, (lambda - sgn * corr(j)) / denom);
        if ((lambda - sgn * corr(j)) / denom < -eps) continue;
        // A variable that just left may come back later on the path, not at once.
        if (j == just_dropped && cand <= eps) continue;
        if (cand < gamma) {
          gamma = cand;
          event = Event::add;
          who = j;
        }
      }
    }
    for (Index i = 0; i < k; ++i) {
      const Index j = active[static_cast<std::size_t>(i)];
      if (d(i) == 0.0) continue;
      const double cand = -beta(j) / d(i);
      if (cand > eps && cand < gamma) {
        gamma = cand;
        event = Event::drop;
        who = j;
      }
    }

    for (Index i = 0; i < k; ++i) beta(active[static_cast<std::size_t>(i)]) += gamma * d(i);
    lambda -= gamma;
    just_dropped = -1;
    if (event == Event::drop) {
      beta(who) = 0.0;
      state[static_cast<std::size_t>(who)] = Membership::inactive;
      sign(who) = 0.0;
      chol.remove(who);
      just_dropped = who;
    }
    corr = z.transpose() * (y - z * beta);
    if (event == Event::finish || lambda <= 1e-13 * lambda0) {
      lambda = 0.0;
      push_knot(lambda);
      break;
    }
    if (event == Event::add) add(who);
    if (gamma > 0.0) push_knot(lambda);
  }
  if (path.lambdas.back() != 0.0) push_knot(std::max(0.0, lambda));
  return path;
}

std::pair<std::size_t, double> LassoPath::locate_fraction(double s) const {
  if (s < 0.0 || s > 1.0) throw InvalidArgument("lasso fraction must lie in [0, 1]");
  const double total = max_l1();
  if (!(total > 0.0) || s == 0.0) return {0, 0.0};
  const double target = s * total;
  const std::size_t last = l1_norms.size() - 1;
  for (std::size_t k = 0; k < last; ++k) {
    if (l1_norms[k + 1] >= target) {
      const double span = l1_norms[k + 1] - l1_norms[k];
      const double t = span > 0.0 ? std::clamp((target - l1_norms[k]) / span, 0.0, 1.0) : 1.0;
      return {k, t};
    }
  }
  return {last, 0.0};
}

VectorXd LassoPath::at_fraction(double s) const {
  const auto [k, t] = locate_fraction(s);
  if (t == 0.0) return betas[k];
  if (t == 1.0) return betas[k + 1];
  return (1.0 - t) * betas[k] + t * betas[k + 1];
}

double LassoPath::lambda_at_fraction(double s) const {
  const auto [k, t] = locate_fraction(s);
  if (t == 0.0) return lambdas[k];
  return (1.0 - t) * lambdas[k] + t * lambdas[k + 1];
}

double lasso_duality_gap(const MatrixXd& z, const VectorXd& y, const VectorXd& beta, double lambda,
                         const VectorXd& weights) {
  const VectorXd w = finite_weights_or_ones(weights, z.cols());
  const VectorXd r = y - z * beta;
  double penalty = 0.0;
  for (Index j = 0; j < z.cols(); ++j) {
    if (beta(j) != 0.0) penalty += w(j) * std::abs(beta(j));
  }
  const double primal = 0.5 * r.squaredNorm() + lambda * penalty;
  const VectorXd corr = z.transpose() * r;
  double scale = 1.0;
  for (Index j = 0; j < z.cols(); ++j) {
    if (!std::isfinite(w(j)) || corr(j) == 0.0) continue;
    scale = std::min(scale, lambda * w(j) / std::abs(corr(j)));
  }
  const VectorXd theta = scale * r;
  const double dual = 0.5 * y.squaredNorm() - 0.5 * (y - theta).squaredNorm();
  return primal - dual;
}

CoordinateDescentResult lasso_coordinate_descent(const MatrixXd& z, const VectorXd& y, double lambda,
                                                 const VectorXd& weights, const VectorXd& warm_start, double tol,
                                                 int max_sweeps) {
  if (z.rows() != y.size()) throw DimensionError("design and response lengths differ");
  const Index p = z.cols();
  const VectorXd w = finite_weights_or_ones(weights, p);
  CoordinateDescentResult out;
  out.beta = warm_start.size() == p ? warm_start : VectorXd::Zero(p);
  VectorXd r = y - z * out.beta;
  const VectorXd col_sq = z.colwise().squaredNorm().transpose();

  for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      double next = 0.0;
      if (col_sq(j) > 0.0 && std::isfinite(w(j))) {
        const double rho = z.col(j).dot(r) + col_sq(j) * out.beta(j);
        next = soft_threshold(rho, lambda * w(j)) / col_sq(j);
      }
      const double delta = next - out.beta(j);
      if (delta != 0.0) {
        r.noalias() -= delta * z.col(j);
        out.beta(j) = next;
        // Measured in gradient units so the stop rule bounds the KKT residual.
        max_change = std::max(max_change, std::abs(delta) * col_sq(j));
      }
    }
    if (max_change < tol) {
      out.converged = true;
      break;
    }
  }
  out.sweeps = std::min(out.sweeps, max_sweeps);
  out.duality_gap = lasso_duality_gap(z, y, out.beta, lambda, w);
  return out;
}

namespace {

RegressionFit lasso_at_fraction(const MatrixXd& z, const VectorXd& y, double s, RegressionMethod method) {
  if (s < 0.0 || s > 1.0) throw InvalidArgument("lasso fraction must lie in [0, 1]");
  const LassoPath path = lasso_path(z, y);
  RegressionFit fit;
  fit.method = method;
  fit.tuning = s;
  if (s == 0.0 || !(path.max_l1() > 0.0)) {
    fit.coefficients = VectorXd::Zero(z.cols());
    fit.penalty = path.lambdas.front();
    return fit;
  }
  VectorXd beta = path.at_fraction(s);
  const double lambda = path.lambda_at_fraction(s);
  fit.penalty = lambda;
  if (lambda > 1e-12 * path.lambdas.front()) {
    auto cd = lasso_coordinate_descent(z, y, lambda, {}, beta);
    if (!cd.converged) {
      throw ConvergenceError("lasso coordinate descent did not converge", cd.duality_gap);
    }
    beta = std::move(cd.beta);
  }
  fit.coefficients = std::move(beta);
  return fit;
}

}  // namespace

RegressionFit fit_lasso(const MatrixXd& z, const VectorXd& y, double s) {
  return lasso_at_fraction(z, y, s, RegressionMethod::lasso);
}

RegressionFit fit_weighted_lasso(const MatrixXd& z, const VectorXd& y, const VectorXd& weights, double s) {
  if (weights.size() != z.cols()) throw DimensionError("penalty weight count differs from predictor count");
  std::vector<Index> kept;
  for (Index j = 0; j < z.cols(); ++j) {
    if (!(weights(j) > 0.0)) throw InvalidArgument("penalty weights must be positive");
    if (std::isfinite(weights(j))) kept.push_back(j);
  }
  MatrixXd scaled(z.rows(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) scaled.col(static_cast<Index>(c)) = z.col(kept[c]) / weights(kept[c]);

  RegressionFit inner = lasso_at_fraction(scaled, y, s, RegressionMethod::adalasso);
  RegressionFit fit = inner;
  fit.coefficients = VectorXd::Zero(z.cols());
  for (std::size_t c = 0; c < kept.size(); ++c) {
    fit.coefficients(kept[c]) = inner.coefficients(static_cast<Index>(c)) / weights(kept[c]);
  }
  return fit;
}

}  // namespace pcornet
