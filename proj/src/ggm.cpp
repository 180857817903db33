#include "pcornet/ggm.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pcornet/error.hpp"
#include "pcornet/format.hpp"
#include "pcornet/rng.hpp"

namespace pcornet {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::shrink: return "shrink";
    case Method::pls: return "pls";
    case Method::ridge: return "ridge";
    case Method::lasso: return "lasso";
    case Method::adalasso: return "adalasso";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::shrink, Method::pls, Method::ridge, Method::lasso,
                                           Method::adalasso};
  return methods;
}

bool is_sparse(Method m) { return m == Method::lasso || m == Method::adalasso; }

std::optional<RegressionMethod> regression_method(Method m) {
  switch (m) {
    case Method::shrink: return std::nullopt;
    case Method::pls: return RegressionMethod::pls;
    case Method::ridge: return RegressionMethod::ridge;
    case Method::lasso: return RegressionMethod::lasso;
    case Method::adalasso: return RegressionMethod::adalasso;
  }
  return std::nullopt;
}

PartialCorrelationMatrix pcor_from_regressions(const std::vector<RegressionFit>& fits, Index p, Method method) {
  std::vector<const RegressionFit*> by_gene(static_cast<std::size_t>(p), nullptr);
  for (const auto& fit : fits) {
    if (fit.response_index < 0 || fit.response_index >= p) {
      throw IncompleteFits("fit for gene index " + std::to_string(fit.response_index) + " is out of range");
    }
    auto& slot = by_gene[static_cast<std::size_t>(fit.response_index)];
    if (slot) throw IncompleteFits("two fits for gene " + std::to_string(fit.response_index));
    if (fit.coefficients.size() != p - 1) {
      throw DimensionError("fit for gene " + std::to_string(fit.response_index) + " has " +
                           std::to_string(fit.coefficients.size()) + " coefficients, expected " +
                           std::to_string(p - 1));
    }
    slot = &fit;
  }
  for (Index i = 0; i < p; ++i) {
    if (!by_gene[static_cast<std::size_t>(i)]) throw IncompleteFits("no fit for gene " + std::to_string(i));
  }

  PartialCorrelationMatrix out;
  out.method = method;
  out.rho = MatrixXd::Identity(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double bij = by_gene[static_cast<std::size_t>(i)]->coefficients(j - 1);
      const double bji = by_gene[static_cast<std::size_t>(j)]->coefficients(i);
      double r = 0.0;
      if (bij * bji > 0.0) r = std::copysign(std::min(1.0, std::sqrt(bij * bji)), bij);
      out.rho(i, j) = r;
      out.rho(j, i) = r;
    }
  }
  return out;
}

PartialCorrelationMatrix pcor_from_precision(const MatrixXd& omega, Method method) {
  if (omega.rows() != omega.cols()) throw DimensionError("precision matrix must be square");
  const Index p = omega.rows();
  for (Index i = 0; i < p; ++i) {
    if (!(omega(i, i) > 0.0)) {
      throw InvalidPrecision("precision diagonal entry " + std::to_string(i) + " is not positive");
    }
  }
  PartialCorrelationMatrix out;
  out.method = method;
  out.rho = MatrixXd::Identity(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double w = 0.5 * (omega(i, j) + omega(j, i));
      const double r = std::clamp(-w / std::sqrt(omega(i, i) * omega(j, j)), -1.0, 1.0);
      out.rho(i, j) = r;
      out.rho(j, i) = r;
    }
  }
  return out;
}

FoldAssignment gene_folds(Index n, int k, std::uint64_t seed, Index gene) {
  return make_folds(n, k, derive_seed(seed, {static_cast<std::uint64_t>(gene)}));
}

NetworkEstimate estimate_network(const ExpressionMatrix& x, Method method, const EstimateOptions& options) {
  require_nonconstant(x);
  const ExpressionMatrix prepared = options.standardize ? standardize_columns(x) : center_columns(x);
  const Index n = prepared.n();
  const Index p = prepared.p();
  NetworkEstimate out;

  if (method == Method::shrink) {
    const ShrinkageEstimate shrunk = shrinkage_covariance(prepared, std::nullopt, options.execution);
    Eigen::LLT<MatrixXd> llt(shrunk.sigma);
    if (llt.info() != Eigen::Success) {
      throw SingularSystem("shrinkage covariance is not positive definite (lambda = " +
                           format_number(shrunk.lambda) + ")");
    }
    out.pcor = pcor_from_precision(llt.solve(MatrixXd::Identity(p, p)), Method::shrink);
    out.shrinkage_lambda = shrunk.lambda;
    return out;
  }

  if (options.k < 2 || options.k > n) {
    throw InvalidFolds("fold count " + std::to_string(options.k) + " is invalid for " + std::to_string(n) +
                       " observations");
  }
  const RegressionMethod rm = *regression_method(method);
  const TuningGrid grid = options.grid ? *options.grid : TuningGrid::standard(n, p);
  out.fits.resize(static_cast<std::size_t>(p));
  parallel_for(p, options.execution, [&](std::ptrdiff_t i) {
    const MatrixXd z = drop_column(prepared.values, i);
    const VectorXd y = prepared.values.col(i);
    const FoldAssignment folds = gene_folds(n, options.k, options.seed, i);
    RegressionFit fit = rm == RegressionMethod::adalasso ? fit_adaptive_lasso(z, y, folds, grid)
                                                         : cv_select(z, y, rm, grid, folds);
    fit.response_index = i;
    out.fits[static_cast<std::size_t>(i)] = std::move(fit);
  });
  out.pcor = pcor_from_regressions(out.fits, p, method);
  return out;
}

PartialCorrelationMatrix estimate_network_matrix(const ExpressionMatrix& x, Method method, int k, std::uint64_t seed,
                                                 Execution execution) {
  EstimateOptions options;
  options.k = k;
  options.seed = seed;
  options.execution = execution;
  return estimate_network(x, method, options).pcor;
}

std::size_t pair_index(Index i, Index j, Index p) {
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i * p - i * (i + 1) / 2 + (j - i - 1));
}

std::vector<double> upper_triangle(const MatrixXd& m) {
  const Index p = m.rows();
  std::vector<double> out;
  out.reserve(pair_count(p));
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) out.push_back(m(i, j));
  }
  return out;
}

Network nonzero_network(const PartialCorrelationMatrix& pcor) {
  Network net;
  net.p = pcor.p();
  for (Index i = 0; i < net.p; ++i) {
    for (Index j = i + 1; j < net.p; ++j) {
      if (pcor.rho(i, j) != 0.0) net.edges.push_back({i, j, pcor.rho(i, j)});
    }
  }
  return net;
}

void write_pcor_csv(std::ostream& out, const PartialCorrelationMatrix& pcor, const std::vector<std::string>& labels) {
  const Index p = pcor.p();
  for (Index j = 0; j < p; ++j) out << (j ? "," : "") << labels.at(static_cast<std::size_t>(j));
  out << '\n';
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) out << (j ? "," : "") << format_number(pcor.rho(i, j));
    out << '\n';
  }
}

void write_edge_list(std::ostream& out, const Network& network, const std::vector<std::string>& labels) {
  out << "gene_i\tgene_j\trho\tlocal_fdr\n";
  for (const auto& e : network.edges) {
    out << labels.at(static_cast<std::size_t>(e.i)) << '\t' << labels.at(static_cast<std::size_t>(e.j)) << '\t'
        << format_number(e.rho) << '\t' << format_number(e.local_fdr) << '\n';
  }
}

}  // namespace pcornet
