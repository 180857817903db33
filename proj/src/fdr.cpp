#include "pcornet/fdr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include "json.hpp"

#include "pcornet/error.hpp"

namespace pcornet {

namespace {

constexpr int kBins = 200;
constexpr int kRefinements = 5;
constexpr double kTruncation = 0.975;
constexpr double kCentralMass = 0.75;

double log_beta_half(double kappa) {
  const double b = 0.5 * (kappa - 1.0);
  return std::lgamma(0.5) + std::lgamma(b) - std::lgamma(0.5 + b);
}

double median_abs(std::vector<double> a) {
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  double m = *mid;
  if (a.size() % 2 == 0) m = 0.5 * (m + *std::max_element(a.begin(), mid));
  return m;
}

double initial_kappa(double median) {
  try {
    const double b = boost::math::ibeta_invb(0.5, median * median, 0.5);
    return std::max(2.0 * b + 1.0, 3.0 + 1e-6);
  } catch (const std::exception&) {
    return 4.0;
  }
}

// Maximizes the likelihood of the statistics below the null's upper truncation
// point, conditioned on lying below it.
double refine_kappa(const std::vector<double>& abs_stats, double kappa) {
  const double c = null_abs_quantile(kTruncation, kappa);
  double log_sum = 0.0;
  double count = 0.0;
  for (double a : abs_stats) {
    if (a < c) {
      log_sum += std::log1p(-a * a);
      count += 1.0;
    }
  }
  if (count < 2.0) return kappa;
  const auto nll = [&](double t) {
    const double k = 3.0 + std::exp(t);
    const double mass = null_abs_cdf(c, k);
    if (!(mass > 0.0)) return std::numeric_limits<double>::infinity();
    return -(0.5 * (k - 3.0) * log_sum - count * log_beta_half(k) - count * std::log(mass));
  };
  const auto best = boost::math::tools::brent_find_minima(nll, std::log(1e-6), std::log(1e6), 40);
  return 3.0 + std::exp(best.first);
}

// Log-density of |r| estimated by a Poisson regression of histogram counts on
// {1, u, u^2, u^3, u^4, log(1 - u)} with u = r^2.
class SmoothedHistogram {
public:
  SmoothedHistogram(const std::vector<double>& abs_stats, double upper) {
    width_ = upper / kBins;
    norm_ = static_cast<double>(abs_stats.size()) * width_;
    VectorXd counts = VectorXd::Zero(kBins);
    for (double a : abs_stats) {
      const int b = std::min(kBins - 1, static_cast<int>(a / width_));
      counts(b) += 1.0;
    }
    MatrixXd x(kBins, kBasis);
    for (int b = 0; b < kBins; ++b) x.row(b) = basis((b + 0.5) * width_).transpose();

    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    const Index rank = qr.rank();
    const MatrixXd q = qr.householderQ() * MatrixXd::Identity(kBins, rank);

    const auto loglik = [&](const VectorXd& eta) { return counts.dot(eta) - eta.array().exp().sum(); };
    VectorXd theta = q.transpose() * VectorXd::Constant(kBins, std::log(counts.mean() + 1e-3));
    VectorXd eta = q * theta;
    double ll = loglik(eta);
    for (int it = 0; it < 200; ++it) {
      const VectorXd mu = eta.array().exp();
      const VectorXd grad = q.transpose() * (counts - mu);
      MatrixXd hess = q.transpose() * mu.asDiagonal() * q;
      hess.diagonal().array() += 1e-10;
      const VectorXd step = hess.ldlt().solve(grad);
      double t = 1.0;
      VectorXd next_theta = theta + step;
      VectorXd next_eta = q * next_theta;
      double next_ll = loglik(next_eta);
      while (!(next_ll >= ll - 1e-12) && t > 1e-8) {
        t *= 0.5;
        next_theta = theta + t * step;
        next_eta = q * next_theta;
        next_ll = loglik(next_eta);
      }
      theta = next_theta;
      eta = next_eta;
      ll = next_ll;
      if ((t * step).cwiseAbs().maxCoeff() < 1e-10) break;
    }
    coef_ = qr.solve(eta);
  }

  /// Density of |r| at a.
  double density(double a) const { return std::exp(basis(a).dot(coef_)) / norm_; }

private:
  static constexpr int kBasis = 6;

  static VectorXd basis(double a) {
    const double u = std::min(a * a, 1.0 - 1e-15);
    VectorXd v(kBasis);
    v << 1.0, u, u * u, u * u * u, u * u * u * u, std::log1p(-u);
    return v;
  }

  double width_ = 0.0;
  double norm_ = 1.0;
  VectorXd coef_;
};

// Non-increasing weighted least-squares fit to y (pool adjacent violators).
std::vector<double> antitonic(const std::vector<double>& y, const std::vector<double>& w) {
  std::vector<double> value, weight;
  std::vector<std::size_t> size;
  for (std::size_t i = 0; i < y.size(); ++i) {
    value.push_back(y[i]);
    weight.push_back(w[i]);
    size.push_back(1);
    while (value.size() > 1 && value[value.size() - 2] < value.back()) {
      const std::size_t last = value.size() - 1;
      const double wt = weight[last - 1] + weight[last];
      value[last - 1] = (value[last - 1] * weight[last - 1] + value[last] * weight[last]) / wt;
      weight[last - 1] = wt;
      size[last - 1] += size[last];
      value.pop_back();
      weight.pop_back();
      size.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < value.size(); ++b) out.insert(out.end(), size[b], value[b]);
  return out;
}

void check_threshold(double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InvalidThreshold("fdr threshold must lie in [0, 1], got " + std::to_string(threshold));
  }
}

}  // namespace

double null_density(double r, double kappa) {
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(0.5 * (kappa - 3.0) * std::log1p(-r * r) - log_beta_half(kappa));
}

double null_abs_cdf(double c, double kappa) {
  if (c <= 0.0) return 0.0;
  if (c >= 1.0) return 1.0;
  return boost::math::ibeta(0.5, 0.5 * (kappa - 1.0), c * c);
}

double null_abs_quantile(double q, double kappa) {
  return std::sqrt(boost::math::ibeta_inv(0.5, 0.5 * (kappa - 1.0), q));
}

double FdrResult::lfdr_at(double r) const {
  const double a = std::abs(r);
  if (curve_abs.empty()) return 1.0;
  if (a <= curve_abs.front()) {
    // Joins the fitted curve to fdr(0) = 1.
    if (curve_abs.front() <= 0.0) return curve_fdr.front();
    const double t = a / curve_abs.front();
    return (1.0 - t) * 1.0 + t * curve_fdr.front();
  }
  if (a >= curve_abs.back()) return curve_fdr.back();
  const auto hi = std::upper_bound(curve_abs.begin(), curve_abs.end(), a);
  const auto k = static_cast<std::size_t>(hi - curve_abs.begin());
  const double t = (a - curve_abs[k - 1]) / (curve_abs[k] - curve_abs[k - 1]);
  return (1.0 - t) * curve_fdr[k - 1] + t * curve_fdr[k];
}

std::string FdrResult::to_json() const {
  nlohmann::json j;
  j["eta0"] = eta0;
  j["kappa_df"] = kappa_df;
  j["threshold"] = threshold;
  j["n_statistics"] = statistics.size();
  j["local_fdr"] = local_fdr;
  return j.dump(1);
}

FdrResult fit_empirical_null(const std::vector<double>& stats, double threshold) {
  check_threshold(threshold);
  if (stats.size() < 100) {
    throw TooFewStatistics("fdr fitting needs at least 100 statistics, got " + std::to_string(stats.size()));
  }
  for (double r : stats) {
    if (!(r >= -1.0 && r <= 1.0)) throw InvalidArgument("statistics must lie in [-1, 1]");
  }
  if (std::all_of(stats.begin(), stats.end(), [&](double r) { return r == stats.front(); })) {
    throw DegenerateDistribution("all statistics are identical");
  }
  std::vector<double> abs_stats(stats.size());
  std::transform(stats.begin(), stats.end(), abs_stats.begin(), [](double r) { return std::abs(r); });
  const double median = median_abs(abs_stats);
  if (!(median > 0.0)) throw DegenerateDistribution("median absolute statistic is zero");

  FdrResult out;
  out.statistics = stats;
  out.threshold = threshold;
  double kappa = initial_kappa(median);
  for (int it = 0; it < kRefinements; ++it) kappa = refine_kappa(abs_stats, kappa);
  out.kappa_df = kappa;

  const double n = static_cast<double>(stats.size());
  const double upper = *std::max_element(abs_stats.begin(), abs_stats.end());
  const SmoothedHistogram hist(abs_stats, upper);

  // Central-mass start, then matched to the fitted density at zero.
  const double c75 = null_abs_quantile(kCentralMass, kappa);
  const double central = static_cast<double>(std::count_if(abs_stats.begin(), abs_stats.end(),
                                                           [&](double a) { return a < c75; }));
  const double eta_central = central / n / kCentralMass;
  const double f0_zero = 2.0 * null_density(0.0, kappa);
  out.eta0_raw = f0_zero > 0.0 ? hist.density(0.0) / f0_zero : eta_central;
  if (!std::isfinite(out.eta0_raw)) out.eta0_raw = eta_central;
  out.eta0 = std::clamp(out.eta0_raw, 0.0, 1.0);

  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return abs_stats[a] < abs_stats[b]; });
  std::vector<double> raw, weight;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const double a = abs_stats[order[idx]];
    if (!out.curve_abs.empty() && out.curve_abs.back() == a) {
      weight.back() += 1.0;
      continue;
    }
    // At zero the ratio is one by the choice of eta0.
    double f = a == 0.0 ? 1.0 : out.eta0_raw * 2.0 * null_density(a, kappa) / hist.density(a);
    if (std::isnan(f)) f = 1.0;
    out.curve_abs.push_back(a);
    raw.push_back(std::clamp(f, 0.0, 1.0));
    weight.push_back(1.0);
  }
  out.curve_fdr = antitonic(raw, weight);

  out.local_fdr.resize(stats.size());
  std::size_t pos = 0;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const double a = abs_stats[order[idx]];
    while (out.curve_abs[pos] != a) ++pos;
    out.local_fdr[order[idx]] = out.curve_fdr[pos];
  }
  return out;
}

std::vector<std::size_t> select_edges(const FdrResult& result, double threshold) {
  check_threshold(threshold);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < result.local_fdr.size(); ++i) {
    if (result.local_fdr[i] < threshold) out.push_back(i);
  }
  return out;
}

Network fdr_network(const PartialCorrelationMatrix& pcor, const FdrResult& result, double threshold) {
  check_threshold(threshold);
  const Index p = pcor.p();
  if (result.local_fdr.size() != pair_count(p)) {
    throw DimensionError("fdr result does not match the matrix size");
  }
  Network net;
  net.p = p;
  std::size_t idx = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j, ++idx) {
      if (result.local_fdr[idx] < threshold) net.edges.push_back({i, j, pcor.rho(i, j), result.local_fdr[idx]});
    }
  }
  return net;
}

std::vector<RocPoint> roc_sweep(const FdrResult& result, const std::vector<bool>& truth,
                                const std::vector<double>& thresholds) {
  if (truth.size() != result.local_fdr.size()) throw DimensionError("truth does not match the statistics");
  const auto positives = static_cast<double>(std::count(truth.begin(), truth.end(), true));
  const double negatives = static_cast<double>(truth.size()) - positives;
  if (positives == 0.0) throw RocUndefined("sensitivity is undefined without true edges");
  std::vector<RocPoint> out;
  for (double t : thresholds) {
    check_threshold(t);
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (result.local_fdr[i] < t) (truth[i] ? tp : fp) += 1.0;
    }
    out.push_back({t, tp / positives, negatives > 0.0 ? (negatives - fp) / negatives : 1.0});
  }
  return out;
}

std::vector<double> default_roc_thresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
  return out;
}

}  // namespace pcornet
