// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// usage: acceptance <path to pcornet CLI> <work dir>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pcornet/commands.hpp"
#include "pcornet/error.hpp"
#include "pcornet/fdr.hpp"
#include "pcornet/ggm.hpp"
#include "pcornet/metrics.hpp"
#include "pcornet/netgen.hpp"
#include "pcornet/regression.hpp"

using namespace pcornet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

fs::path work;
std::string cli;

// ---------------------------------------------------------------------------

Outcome formulation_equivalence() {
  Rng rng(101);
  double worst = 0.0, worst_oracle = 0.0;
  const Index sizes[] = {5, 10, 20};
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 200, p = sizes[trial % 3];
    const MatrixXd raw = oracle::gaussian_matrix(n, p, rng) * oracle::gaussian_matrix(p, p, rng);
    const MatrixXd x = raw.rowwise() - raw.colwise().mean();
    const auto inv = pcor_from_precision((x.transpose() * x).inverse());
    std::vector<RegressionFit> fits;
    for (Index i = 0; i < p; ++i) {
      auto fit = fit_ridge(drop_column(x, i), x.col(i), 0.0);
      fit.response_index = i;
      fits.push_back(fit);
    }
    const auto reg = pcor_from_regressions(fits, p);
    worst = std::max(worst, (inv.rho - reg.rho).cwiseAbs().maxCoeff());
    for (Index i = 0; i < p; ++i) {
      for (Index j = i + 1; j < p; ++j) {
        worst_oracle = std::max(worst_oracle, std::abs(inv.rho(i, j) - oracle::residual_partial_correlation(x, i, j)));
      }
    }
  }
  return {worst <= 1e-8 && worst_oracle <= 1e-8,
          "max |inversion - regression| " + fmt(worst) + ", vs residual oracle " + fmt(worst_oracle)};
}

Outcome lasso_correctness() {
  Rng rng(102);
  double kkt_cd = 0.0, diff_cd = 0.0, kkt_path = 0.0, diff_path = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXd z = oracle::gaussian_matrix(20, 8, rng);
    VectorXd beta(8);
    for (Index j = 0; j < 8; ++j) beta(j) = rng.uniform() < 0.5 ? 0.0 : rng.normal();
    const VectorXd y = z * beta + oracle::gaussian_vector(20, rng);

    const double lambda = rng.uniform(0.05, 0.95) * (z.transpose() * y).cwiseAbs().maxCoeff();
    const auto cd = lasso_coordinate_descent(z, y, lambda);
    kkt_cd = std::max(kkt_cd, oracle::lasso_kkt_violation(z, y, cd.beta, lambda));
    diff_cd = std::max(diff_cd, (cd.beta - oracle::penalized_lasso(z, y, lambda)).cwiseAbs().maxCoeff());

    // Production path: homotopy to the requested fraction, then CD polish.
    const double s = rng.uniform(0.05, 0.95);
    const auto fit = fit_lasso(z, y, s);
    kkt_path = std::max(kkt_path, oracle::lasso_kkt_violation(z, y, fit.coefficients, fit.penalty));
    const auto ref = oracle::constrained_lasso(z, y, s * oracle::ols(z, y).lpNorm<1>(), 1e-12);
    diff_path = std::max(diff_path, (fit.coefficients - ref.beta).cwiseAbs().maxCoeff());
  }
  return {kkt_cd <= 1e-6 && diff_cd <= 1e-5 && kkt_path <= 1e-6 && diff_path <= 1e-5,
          "CD: kkt " + fmt(kkt_cd) + ", vs oracle " + fmt(diff_cd) + "; fraction fits: kkt " + fmt(kkt_path) +
              ", vs oracle " + fmt(diff_path)};
}

Outcome pls_correctness() {
  Rng rng(103);
  double ortho = 0.0, vs_ols = 0.0, primal_dual = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Full rank, n > p.
    const Index p = 2 + static_cast<Index>(rng.below(12));
    const Index n = p + 3 + static_cast<Index>(rng.below(30));
    const MatrixXd z = oracle::gaussian_matrix(n, p, rng);
    const VectorXd y = oracle::gaussian_vector(n, rng);
    vs_ols = std::max(vs_ols,
                      (fit_pls(z, y, static_cast<int>(p)).coefficients - oracle::ols(z, y)).cwiseAbs().maxCoeff());

    // Wide designs as well.
    const Index n2 = 10 + static_cast<Index>(rng.below(20));
    const Index p2 = 5 + static_cast<Index>(rng.below(40));
    const MatrixXd z2 = oracle::gaussian_matrix(n2, p2, rng);
    const VectorXd y2 = oracle::gaussian_vector(n2, rng);
    const int m = static_cast<int>(std::min<Index>(8, std::min(n2, p2) - 1));
    const auto a = pls_primal(z2, y2, m);
    const auto b = pls_dual(z2, y2, m);
    for (const auto* model : {&a, &b}) {
      const int k = model->components();
      const MatrixXd tt = model->scores.transpose() * model->scores;
      ortho = std::max(ortho, (tt - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
    }
    for (int c = 1; c <= std::min(a.components(), b.components()); ++c) {
      primal_dual = std::max(primal_dual, (a.coefficients(c) - b.coefficients(c)).cwiseAbs().maxCoeff());
    }
  }
  return {ortho <= 1e-8 && vs_ols <= 1e-6 && primal_dual <= 1e-8,
          "orthogonality " + fmt(ortho) + ", full rank vs OLS " + fmt(vs_ols) + ", primal vs dual " + fmt(primal_dual)};
}

// report.tsv rows keyed by (method, n, replication).
struct Row {
  bool ok = false;
  double n_selected = 0.0, power = 0.0;
  std::optional<double> tdr;
};

std::map<std::tuple<std::string, int, int>, Row> read_report(const fs::path& path) {
  std::map<std::tuple<std::string, int, int>, Row> rows;
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream s(line);
    for (std::string c; std::getline(s, c, '\t');) cells.push_back(c);
    Row r;
    r.ok = cells.at(9) == "ok";
    if (r.ok) {
      r.n_selected = std::stod(cells[5]);
      r.power = std::stod(cells[6]);
      if (cells[7] != "NA") r.tdr = std::stod(cells[7]);
    }
    rows[{cells[1], std::stoi(cells[2]), std::stoi(cells[3])}] = r;
  }
  return rows;
}

RunConfig study_config(const std::string& out, std::vector<Method> methods, std::vector<Index> sizes) {
  RunConfig c;
  c.out = work / out;
  c.methods = std::move(methods);
  c.seed = 2024;
  c.jobs = 0;
  c.grid.p = 40;
  c.grid.sample_sizes = std::move(sizes);
  c.grid.replications = 10;
  c.grid.topologies = {Topology::random_density(0.05)};
  c.grid.root_seed = c.seed;
  return c;
}

Outcome sparsity_ordering() {
  const auto c = study_config("sparsity", {Method::lasso, Method::adalasso}, {30, 60});
  std::ostringstream log;
  const int code = cmd_simulate(c, log);
  const auto rows = read_report(c.out / "report.tsv");
  int cells = 0, held = 0;
  for (int n : {30, 60}) {
    for (int r = 1; r <= 10; ++r) {
      ++cells;
      const Row& lasso = rows.at({"lasso", n, r});
      const Row& ada = rows.at({"adalasso", n, r});
      held += lasso.ok && ada.ok && ada.n_selected <= lasso.n_selected;
    }
  }
  return {code == 0 && held * 10 >= cells * 9, std::to_string(held) + "/" + std::to_string(cells) + " cells"};
}

Outcome simulation_orderings() {
  const auto c = study_config("orderings", all_methods(), {30, 60, 120});
  std::ostringstream log;
  const int code = cmd_simulate(c, log);
  const auto rows = read_report(c.out / "report.tsv");
  const double true_edges = static_cast<double>(simulate_pcor_density(40, 0.05, 0).edges.size());

  const auto mean_of = [&](const std::string& m, int n, const std::function<std::optional<double>(const Row&)>& f) {
    std::vector<double> v;
    for (int r = 1; r <= 10; ++r) {
      const Row& row = rows.at({m, n, r});
      if (!row.ok) continue;
      if (auto x = f(row)) v.push_back(*x);
    }
    return oracle::mean(v);
  };
  const auto tdr = [](const Row& r) { return r.tdr; };
  const auto power = [](const Row& r) { return std::optional<double>(r.power); };
  const auto selected = [](const Row& r) { return std::optional<double>(r.n_selected); };

  bool a = true, b = true, cc = true;
  std::string detail;
  for (int n : {30, 60, 120}) {
    const double lt = mean_of("lasso", n, tdr), at = mean_of("adalasso", n, tdr);
    a = a && lt < at;
    const double lp = mean_of("lasso", n, power);
    for (const char* m : {"shrink", "ridge", "pls"}) b = b && lp >= mean_of(m, n, power);
    const double ss = mean_of("shrink", n, selected), rs = mean_of("ridge", n, selected);
    cc = cc && ss < true_edges && rs < true_edges;
    detail += " n=" + std::to_string(n) + ": tdr " + fmt(lt) + "<" + fmt(at) + ", lasso power " + fmt(lp) +
              ", selected shrink " + fmt(ss) + " ridge " + fmt(rs) + " of " + fmt(true_edges) + ";";
  }
  return {code == 0 && a && b && cc,
          std::string("(a) ") + (a ? "ok" : "no") + " (b) " + (b ? "ok" : "no") + " (c) " + (cc ? "ok" : "no") + ";" +
              detail};
}

Outcome density_magnitude() {
  std::vector<double> means;
  bool decreasing = true;
  for (double d : {0.05, 0.10, 0.15, 0.20, 0.25}) {
    std::vector<double> per_generation;
    for (std::uint64_t g = 0; g < 20; ++g) {
      const auto t = simulate_pcor_density(100, d, derive_seed(106, {g}));
      double total = 0.0;
      for (const auto& [i, j] : t.edges) total += std::abs(t.pcor.rho(i, j));
      per_generation.push_back(total / static_cast<double>(t.edges.size()));
    }
    means.push_back(oracle::mean(per_generation));
    if (means.size() > 1 && !(means.back() < means[means.size() - 2])) decreasing = false;
  }
  std::string detail = "mean |rho|:";
  for (double m : means) detail += " " + fmt(m);
  return {decreasing, detail};
}

Outcome fdr_calibration() {
  int quiet = 0, recovered_runs = 0, worst_recovered = 50;
  for (std::uint64_t run = 0; run < 20; ++run) {
    Rng rng(derive_seed(107, {run}));
    const auto null_fit = fit_empirical_null(oracle::null_correlations(20.0, 4950, rng));
    quiet += select_edges(null_fit, 0.2).size() <= 2;

    auto stats = oracle::null_correlations(20.0, 4900, rng);
    for (int i = 0; i < 50; ++i) stats.push_back(i % 2 ? 0.9 : -0.9);
    const auto planted = fit_empirical_null(stats);
    int found = 0;
    for (std::size_t i = 4900; i < stats.size(); ++i) found += planted.local_fdr[i] < 0.2;
    worst_recovered = std::min(worst_recovered, found);
    recovered_runs += found >= 45;
  }
  return {quiet >= 18 && recovered_runs == 20,
          "null runs with <= 2 edges: " + std::to_string(quiet) + "/20; planted recovered >= 45/50 in " +
              std::to_string(recovered_runs) + "/20 runs (worst " + std::to_string(worst_recovered) + ")"};
}

Outcome fleiss() {
  std::vector<int> perfect(10000);
  for (std::size_t i = 0; i < perfect.size(); ++i) perfect[i] = i % 3 == 0 ? 10 : 0;
  const double k1 = fleiss_kappa(perfect, 10).kappa;
  Rng rng(108);
  std::vector<int> coins(10000, 0);
  for (int& c : coins) {
    for (int r = 0; r < 10; ++r) c += rng.uniform() < 0.5;
  }
  const double k0 = fleiss_kappa(coins, 10).kappa;
  return {k1 == 1.0 && std::abs(k0) < 0.05, "perfect " + fmt(k1) + ", coins " + fmt(k0)};
}

Outcome stability_ordering() {
  int wins = 0;
  std::string detail;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto truth = simulate_pcor_density(30, 0.05, derive_seed(109, {t, 0}));
    const auto x = sample_data(truth, 40, derive_seed(109, {t, 1}));
    StabilityOptions opt;
    opt.seed = derive_seed(109, {t, 2});
    std::optional<double> shrink;
    double regression = 0.0;
    for (Method m : all_methods()) {
      std::optional<double> kappa;
      try {
        kappa = subsample_stability(x, m, opt).kappa;
      } catch (const KappaUndefined&) {
      }
      if (m == Method::shrink) {
        shrink = kappa;
      } else {
        regression += kappa.value_or(std::numeric_limits<double>::quiet_NaN()) / 4.0;
      }
    }
    wins += shrink && *shrink >= regression;
    detail += " " + (shrink ? fmt(*shrink) : std::string("NA")) + "/" + fmt(regression);
  }
  return {wins >= 7, std::to_string(wins) + "/10 trials; shrink/regression-mean kappa:" + detail};
}

Outcome edge_counts() {
  const auto a = simulate_pcor_density(100, 0.05, 110).edges.size();
  const auto b = simulate_pcor_topology(100, Topology::clusters(1), 110).edges.size();
  const auto c = simulate_pcor_topology(99, Topology::stars(3), 110).edges.size();
  return {a == 248 && b == 4950 && c == 96,
          "density(0.05) " + std::to_string(a) + ", clusters(1) " + std::to_string(b) + ", stars(3) " +
              std::to_string(c)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every file under a, with its bytes, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& a) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), a).string()] = slurp(e.path());
  }
  return out;
}

Outcome cli_determinism() {
  const fs::path root = work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto data = sample_data(simulate_pcor_density(20, 0.1, 111), 60, 112);
  write_csv(root / "data.csv", data);
  const std::string csv = (root / "data.csv").string();

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "simulate --p 20 --densities 0.1 --topology 'stars(2)' --n 30,60 --reps 2"},
      {"roc", "roc --p 20 --densities 0.1 --n 40 --reps 2"},
      {"estimate", "estimate " + csv},
      {"stability", "stability " + csv + " --replicates 3"},
  };
  std::string detail;
  bool pass = true;
  for (const auto& [name, args] : commands) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* run : {"j1", "j4", "j4b"}) {
      const fs::path out = root / (name + "_" + run);
      const std::string jobs = std::string(run) == "j1" ? "1" : "4";
      const std::string cmd = "\"" + cli + "\" " + args + " --seed 77 --jobs " + jobs + " --out \"" + out.string() +
                              "\" > \"" + out.string() + ".stdout\" 2> \"" + out.string() + ".stderr\"";
      const int code = std::system(cmd.c_str());
      auto files = fs::exists(out) ? tree(out) : std::map<std::string, std::string>{};
      files["<stdout>"] = slurp(out.string() + ".stdout");
      files["<stderr>"] = slurp(out.string() + ".stderr");
      files["<exit>"] = std::to_string(code);
      runs.push_back(std::move(files));
    }
    const bool same = runs[0] == runs[1] && runs[1] == runs[2];
    const bool ok = same && runs[0]["<exit>"] == "0" && runs[0].size() > 3;
    pass = pass && ok;
    detail += " " + name + (ok ? " identical" : same ? " identical but failed" : " DIFFERS") + " (" +
              std::to_string(runs[0].size() - 3) + " files);";
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <pcornet CLI> <work dir>\n";
    return 2;
  }
  cli = fs::absolute(argv[1]).string();
  work = fs::absolute(argv[2]);
  fs::create_directories(work);

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
    double limit_seconds;  // 0 = no runtime bound
  };
  const std::vector<Criterion> criteria{
      {1, "formulation equivalence", formulation_equivalence, 10},
      {2, "lasso correctness", lasso_correctness, 30},
      {3, "PLS correctness", pls_correctness, 0},
      {4, "sparsity ordering", sparsity_ordering, 600},
      {5, "simulation orderings", simulation_orderings, 1200},
      {6, "density-magnitude effect", density_magnitude, 0},
      {7, "fdr null calibration", fdr_calibration, 0},
      {8, "Fleiss kappa", fleiss, 0},
      {9, "stability ordering", stability_ordering, 0},
      {10, "edge-count exactness", edge_counts, 0},
      {11, "CLI determinism", cli_determinism, 0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += " [over the " + fmt(c.limit_seconds) + " s limit]";
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
