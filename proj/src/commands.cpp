#include "pcornet/commands.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "pcornet/error.hpp"
#include "pcornet/fdr.hpp"
#include "pcornet/format.hpp"
#include "pcornet/metrics.hpp"
#include "pcornet/parallel.hpp"
#include "pcornet/rng.hpp"

namespace pcornet {

namespace {

using Clock = std::chrono::steady_clock;

enum SeedStream : std::uint64_t { kTruth = 1, kData = 2, kEstimate = 3 };

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

void prepare_output(const RunConfig& config, const std::string& command) {
  std::filesystem::create_directories(config.out);
  write_text(config.out / "manifest.json", manifest_json(config, command) + "\n");
}

std::vector<double> thresholds_of(const RunConfig& config) {
  return config.roc_thresholds.empty() ? default_roc_thresholds() : config.roc_thresholds;
}

struct Moments {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sd = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

Moments moments(const std::vector<double>& values) {
  Moments m;
  std::vector<double> v;
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  m.count = v.size();
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

// One (topology, sample size, replication) unit of the simulation grid.
struct Replicate {
  std::size_t topology = 0;
  std::size_t size = 0;
  int replication = 0;
};

std::vector<Replicate> replicates_of(const ScenarioGrid& grid) {
  std::vector<Replicate> out;
  for (std::size_t t = 0; t < grid.topologies.size(); ++t) {
    for (std::size_t s = 0; s < grid.sample_sizes.size(); ++s) {
      for (int r = 0; r < grid.replications; ++r) out.push_back({t, s, r});
    }
  }
  return out;
}

struct SimulatedData {
  TrueNetwork truth;
  ExpressionMatrix x;
  std::uint64_t estimate_seed = 0;
};

SimulatedData simulate_replicate(const RunConfig& config, const Replicate& rep) {
  const auto t = static_cast<std::uint64_t>(rep.topology);
  const auto s = static_cast<std::uint64_t>(rep.size);
  const auto r = static_cast<std::uint64_t>(rep.replication);
  SimulatedData d;
  d.truth = simulate_network(config.grid.p, config.grid.topologies[rep.topology],
                             derive_seed(config.seed, {kTruth, t, s, r}));
  d.x = sample_data(d.truth, config.grid.sample_sizes[rep.size], derive_seed(config.seed, {kData, t, s, r}));
  d.estimate_seed = derive_seed(config.seed, {kEstimate, t, s, r});
  return d;
}

EstimateOptions estimate_options(const RunConfig& config, std::uint64_t seed, Execution execution) {
  EstimateOptions o;
  o.k = config.k;
  o.seed = seed;
  o.standardize = config.standardize;
  o.execution = execution;
  return o;
}

std::string runtime_text(const RunConfig& config, double ms) {
  return config.timing ? format_number(std::round(ms * 1000.0) / 1000.0) : "NA";
}

void check_gene_cap(const RunConfig& config, Method m, Index p) {
  if (is_sparse(m) && p > config.cap_genes) {
    throw InvalidArgument(std::string(to_string(m)) + " on " + std::to_string(p) + " genes exceeds --cap-genes " +
                          std::to_string(config.cap_genes) + "; raise the cap to proceed");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (methods.empty()) throw InvalidArgument("at least one method is required");
  if (k < 2) throw InvalidFolds("fold count must be at least 2");
  if (!(fdr_threshold > 0.0 && fdr_threshold <= 1.0)) throw InvalidThreshold("--fdr must lie in (0, 1]");
  if (jobs < 0) throw InvalidArgument("--jobs must be nonnegative");
  if (cap_genes < 2) throw InvalidArgument("--cap-genes must be at least 2");
  for (double t : roc_thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidThreshold("ROC thresholds must lie in [0, 1]");
  }
}

std::string manifest_json(const RunConfig& config, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = config.seed;
  nlohmann::ordered_json c;
  std::vector<std::string> methods;
  for (Method m : config.methods) methods.emplace_back(to_string(m));
  c["methods"] = methods;
  c["k"] = config.k;
  c["fdr"] = config.fdr_threshold;
  c["standardize"] = config.standardize;
  c["cap_genes"] = config.cap_genes;
  c["timing"] = config.timing;
  if (command == "simulate" || command == "roc") {
    c["p"] = config.grid.p;
    c["sample_sizes"] = config.grid.sample_sizes;
    c["replications"] = config.grid.replications;
    std::vector<std::string> topologies;
    for (const auto& t : config.grid.topologies) topologies.push_back(t.label());
    c["topologies"] = topologies;
  }
  if (command == "roc") c["thresholds"] = thresholds_of(config);
  if (command == "estimate" || command == "stability") {
    c["data"] = config.data.string();
    c["header"] = config.has_header;
  }
  if (command == "stability") {
    c["replicates"] = config.replicates;
    c["drop_fraction"] = config.drop_fraction;
  }
  j["config"] = c;
  j["versions"] = {{"pcornet", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                                 "." + std::to_string(BOOST_VERSION % 100)}};
  return j.dump(2);
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  config.grid.validate();
  set_jobs(config.jobs);
  prepare_output(config, "simulate");

  struct CellResult {
    RecoveryScore score;
    double runtime_ms = 0.0;
    std::string error;
  };
  const auto reps = replicates_of(config.grid);
  const std::size_t per_rep = config.methods.size();
  std::vector<CellResult> results(reps.size() * per_rep);
  parallel_for(static_cast<std::ptrdiff_t>(results.size()), Execution::parallel, [&](std::ptrdiff_t c) {
    const auto& rep = reps[static_cast<std::size_t>(c) / per_rep];
    const Method method = config.methods[static_cast<std::size_t>(c) % per_rep];
    CellResult& res = results[static_cast<std::size_t>(c)];
    try {
      const SimulatedData d = simulate_replicate(config, rep);
      const auto start = Clock::now();
      const auto est = estimate_network(d.x, method, estimate_options(config, d.estimate_seed, Execution::serial));
      const Network net = select_network(est.pcor, method, config.fdr_threshold);
      res.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      res.score = score_recovery(est.pcor, net, d.truth);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  auto report = open_output(config.out / "report.tsv");
  report << "scenario\tmethod\tn\treplication\tmse\tn_selected\tpower\ttdr\truntime_ms\tstatus\n";
  int failures = 0;
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  std::map<Key, std::vector<const CellResult*>> groups;
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& rep = reps[c / per_rep];
    const std::size_t mi = c % per_rep;
    const auto& res = results[c];
    report << config.grid.topologies[rep.topology].label() << '\t' << to_string(config.methods[mi]) << '\t'
           << config.grid.sample_sizes[rep.size] << '\t' << rep.replication + 1 << '\t';
    if (res.error.empty()) {
      report << format_number(res.score.mse) << '\t' << res.score.n_selected << '\t' << format_number(res.score.power)
             << '\t' << format_number(res.score.tdr) << '\t' << runtime_text(config, res.runtime_ms) << "\tok\n";
      groups[{rep.topology, mi, rep.size}].push_back(&res);
    } else {
      ++failures;
      report << "NA\tNA\tNA\tNA\tNA\terror: " << res.error << '\n';
      log << "cell " << config.grid.topologies[rep.topology].label() << " " << to_string(config.methods[mi])
          << " n=" << config.grid.sample_sizes[rep.size] << " rep=" << rep.replication + 1
          << " failed: " << res.error << '\n';
    }
  }

  auto summary = open_output(config.out / "summary.tsv");
  summary << "scenario\tmethod\tn\treplications\tmse_mean\tmse_sd\tn_selected_mean\tn_selected_sd\tpower_mean\t"
             "power_sd\ttdr_mean\ttdr_sd\ttdr_defined\n";
  for (const auto& [key, cells] : groups) {
    const auto& [t, mi, s] = key;
    std::vector<double> mse, sel, power, tdr;
    for (const auto* r : cells) {
      mse.push_back(r->score.mse);
      sel.push_back(static_cast<double>(r->score.n_selected));
      power.push_back(r->score.power);
      tdr.push_back(r->score.tdr.value_or(std::numeric_limits<double>::quiet_NaN()));
    }
    const Moments a = moments(mse), b = moments(sel), c = moments(power), d = moments(tdr);
    summary << config.grid.topologies[t].label() << '\t' << to_string(config.methods[mi]) << '\t'
            << config.grid.sample_sizes[s] << '\t' << cells.size() << '\t' << format_number(a.mean) << '\t'
            << format_number(a.sd) << '\t' << format_number(b.mean) << '\t' << format_number(b.sd) << '\t'
            << format_number(c.mean) << '\t' << format_number(c.sd) << '\t' << format_number(d.mean) << '\t'
            << format_number(d.sd) << '\t' << d.count << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_roc(const RunConfig& config, std::ostream& log) {
  config.validate();
  config.grid.validate();
  set_jobs(config.jobs);
  prepare_output(config, "roc");
  const std::vector<double> thresholds = thresholds_of(config);

  const auto reps = replicates_of(config.grid);
  const std::size_t per_rep = config.methods.size();
  // Sparse methods yield a single point stored at index 0.
  std::vector<std::vector<RocPoint>> curves(reps.size() * per_rep);
  std::vector<std::string> errors(curves.size());
  parallel_for(static_cast<std::ptrdiff_t>(curves.size()), Execution::parallel, [&](std::ptrdiff_t c) {
    const auto& rep = reps[static_cast<std::size_t>(c) / per_rep];
    const Method method = config.methods[static_cast<std::size_t>(c) % per_rep];
    try {
      const SimulatedData d = simulate_replicate(config, rep);
      const auto est = estimate_network(d.x, method, estimate_options(config, d.estimate_seed, Execution::serial));
      const std::vector<bool> truth = d.truth.edge_mask();
      if (is_sparse(method)) {
        // Nonzero pairs get fdr 0 and zeros get 1, so 0.5 selects exactly the nonzero pairs.
        FdrResult points;
        for (double r : upper_triangle(est.pcor.rho)) points.local_fdr.push_back(r != 0.0 ? 0.0 : 1.0);
        curves[static_cast<std::size_t>(c)] = roc_sweep(points, truth, {0.5});
      } else if (nonzero_network(est.pcor).edges.empty()) {
        FdrResult none;
        none.local_fdr.assign(truth.size(), 1.0);
        curves[static_cast<std::size_t>(c)] = roc_sweep(none, truth, thresholds);
      } else {
        const FdrResult fdr = fit_empirical_null(upper_triangle(est.pcor.rho), config.fdr_threshold);
        curves[static_cast<std::size_t>(c)] = roc_sweep(fdr, truth, thresholds);
      }
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(c)] = e.what();
    }
  });

  int failures = 0;
  for (std::size_t c = 0; c < errors.size(); ++c) {
    if (errors[c].empty()) continue;
    ++failures;
    const auto& rep = reps[c / per_rep];
    log << "cell " << config.grid.topologies[rep.topology].label() << " " << to_string(config.methods[c % per_rep])
        << " n=" << config.grid.sample_sizes[rep.size] << " rep=" << rep.replication + 1 << " failed: " << errors[c]
        << '\n';
  }

  for (std::size_t mi = 0; mi < per_rep; ++mi) {
    const Method method = config.methods[mi];
    auto out = open_output(config.out / ("roc_" + std::string(to_string(method)) + ".csv"));
    out << "scenario,n,threshold,sensitivity,specificity,replications\n";
    for (std::size_t t = 0; t < config.grid.topologies.size(); ++t) {
      for (std::size_t s = 0; s < config.grid.sample_sizes.size(); ++s) {
        const std::size_t points = is_sparse(method) ? 1 : thresholds.size();
        std::vector<double> sens(points, 0.0), spec(points, 0.0);
        std::size_t used = 0;
        for (std::size_t c = mi; c < curves.size(); c += per_rep) {
          const auto& rep = reps[c / per_rep];
          if (rep.topology != t || rep.size != s || !errors[c].empty()) continue;
          ++used;
          for (std::size_t k = 0; k < points; ++k) {
            sens[k] += curves[c][k].sensitivity;
            spec[k] += curves[c][k].specificity;
          }
        }
        for (std::size_t k = 0; k < points; ++k) {
          const double u = static_cast<double>(used);
          out << config.grid.topologies[t].label() << ',' << config.grid.sample_sizes[s] << ','
              << (is_sparse(method) ? "NA" : format_number(thresholds[k])) << ','
              << format_number(used ? sens[k] / u : std::numeric_limits<double>::quiet_NaN()) << ','
              << format_number(used ? spec[k] / u : std::numeric_limits<double>::quiet_NaN()) << ',' << used << '\n';
        }
      }
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_estimate(const RunConfig& config, std::ostream& log) {
  config.validate();
  set_jobs(config.jobs);
  const ExpressionMatrix x = load_csv(config.data, config.has_header);
  require_nonconstant(x);
  for (Method m : config.methods) check_gene_cap(config, m, x.p());
  prepare_output(config, "estimate");

  std::vector<std::pair<std::string, Network>> networks;
  int failures = 0;
  for (Method method : config.methods) {
    const std::string name(to_string(method));
    try {
      const auto start = Clock::now();
      const NetworkEstimate est = estimate_network(x, method, estimate_options(config, config.seed, Execution::parallel));
      std::optional<Network> net;
      std::optional<FdrResult> fdr;
      std::string rule;
      if (is_sparse(method)) {
        net = nonzero_network(est.pcor);
        rule = "nonzero";
      } else if (pair_count(x.p()) >= 100 && nonzero_network(est.pcor).edges.empty()) {
        net = Network{x.p(), {}};
        rule = "local fdr < " + format_number(config.fdr_threshold);
        log << "warning: " << name << ": all partial correlations are zero; no edges selected\n";
      } else if (pair_count(x.p()) >= 100) {
        fdr = fit_empirical_null(upper_triangle(est.pcor.rho), config.fdr_threshold);
        net = fdr_network(est.pcor, *fdr, config.fdr_threshold);
        rule = "local fdr < " + format_number(config.fdr_threshold);
      } else {
        rule = "none";
        log << "warning: " << name << ": only " << pair_count(x.p())
            << " gene pairs, too few for fdr testing; reporting partial correlations only\n";
      }
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();

      {
        auto out = open_output(config.out / (name + "_pcor.csv"));
        write_pcor_csv(out, est.pcor, x.gene_labels);
      }
      {
        auto out = open_output(config.out / (name + "_edges.tsv"));
        write_edge_list(out, net ? *net : Network{x.p(), {}}, x.gene_labels);
      }
      if (fdr) write_text(config.out / (name + "_fdr.json"), fdr->to_json() + "\n");

      nlohmann::ordered_json j;
      j["method"] = name;
      j["n"] = x.n();
      j["p"] = x.p();
      j["edge_rule"] = rule;
      if (net) {
        j["n_selected"] = net->edges.size();
        j["percent_selected"] = 100.0 * static_cast<double>(net->edges.size()) / static_cast<double>(pair_count(x.p()));
        const auto frac = positive_edge_fraction(*net);
        j["positive_edge_fraction"] = frac ? nlohmann::ordered_json(*frac) : nlohmann::ordered_json(nullptr);
        j["connectivity"] = connectivity_distribution(*net, x.p());
      } else {
        j["n_selected"] = nullptr;
        j["percent_selected"] = nullptr;
        j["positive_edge_fraction"] = nullptr;
        j["connectivity"] = nullptr;
      }
      if (fdr) {
        j["eta0"] = fdr->eta0;
        j["kappa_df"] = fdr->kappa_df;
      }
      if (method == Method::shrink) j["shrinkage_lambda"] = est.shrinkage_lambda;
      if (!est.fits.empty()) {
        std::vector<double> tuning;
        for (const auto& f : est.fits) tuning.push_back(f.tuning);
        j["tuning"] = tuning;
      }
      j["runtime_ms"] = config.timing ? nlohmann::ordered_json(ms) : nlohmann::ordered_json("NA");
      write_text(config.out / (name + "_summary.json"), j.dump(2) + "\n");
      if (net) networks.emplace_back(name, std::move(*net));
    } catch (const Error& e) {
      ++failures;
      log << name << " failed: " << e.what() << '\n';
    }
  }

  if (networks.size() >= 2) {
    const OverlapTable table = overlap_table(networks);
    auto out = open_output(config.out / "overlap.tsv");
    out << "method";
    for (const auto& m : table.methods) out << '\t' << m;
    out << '\n';
    for (std::size_t a = 0; a < table.methods.size(); ++a) {
      out << table.methods[a];
      for (const auto& v : table.overlap[a]) out << '\t' << format_number(v);
      out << '\n';
    }
    out << "percent_selected";
    for (double v : table.percent_selected) out << '\t' << format_number(v);
    out << '\n';
  }
  return failures == 0 ? 0 : 1;
}

int cmd_stability(const RunConfig& config, std::ostream& log) {
  config.validate();
  set_jobs(config.jobs);
  const ExpressionMatrix x = load_csv(config.data, config.has_header);
  if (x.n() < 10) throw TooFewObservations("stability analysis needs at least 10 observations");
  require_nonconstant(x);
  for (Method m : config.methods) check_gene_cap(config, m, x.p());
  prepare_output(config, "stability");

  std::vector<double> kappas;
  int failures = 0;
  for (Method method : config.methods) {
    StabilityOptions o;
    o.replicates = config.replicates;
    o.drop_fraction = config.drop_fraction;
    o.seed = config.seed;
    o.k = config.k;
    o.fdr_threshold = config.fdr_threshold;
    o.standardize = config.standardize;
    try {
      kappas.push_back(subsample_stability(x, method, o).kappa);
    } catch (const KappaUndefined& e) {
      kappas.push_back(std::numeric_limits<double>::quiet_NaN());
      log << "warning: " << to_string(method) << ": " << e.what() << '\n';
    } catch (const Error& e) {
      ++failures;
      kappas.push_back(std::numeric_limits<double>::quiet_NaN());
      log << to_string(method) << " failed: " << e.what() << '\n';
    }
  }

  std::vector<double> defined;
  for (double k : kappas) {
    if (!std::isnan(k)) defined.push_back(k);
  }
  const std::vector<double> ranks = descending_ranks(defined);
  auto out = open_output(config.out / "stability.tsv");
  out << "measure";
  for (Method m : config.methods) out << '\t' << to_string(m);
  out << "\nkappa";
  for (double k : kappas) out << '\t' << format_number(k);
  out << "\nrank";
  std::size_t next = 0;
  for (double k : kappas) out << '\t' << (std::isnan(k) ? std::string("NA") : format_number(ranks[next++]));
  out << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace pcornet
