// pcornet: gene-association networks from regularized partial correlations.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pcornet/commands.hpp"
#include "pcornet/error.hpp"

using namespace pcornet;

namespace {

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const Method m = parse_method(item);
    for (Method seen : out) {
      if (seen == m) throw InvalidArgument("method '" + item + "' listed twice");
    }
    out.push_back(m);
  }
  return out;
}

struct Flags {
  std::string methods = "shrink,pls,ridge,lasso,adalasso";
  std::string grid_file;
  std::vector<double> densities;
  std::vector<std::string> topologies;
  std::vector<Index> sizes;
  int reps = 0;
  Index p = 0;
  bool seed_given = false;
};

void add_common(CLI::App* cmd, RunConfig& config, Flags& flags) {
  cmd->add_option("--methods", flags.methods, "Comma-separated subset of shrink,pls,ridge,lasso,adalasso")
      ->capture_default_str();
  cmd->add_option("--k", config.k, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--fdr", config.fdr_threshold, "Local fdr threshold for shrink, ridge and pls")
      ->capture_default_str();
  cmd->add_option_function<std::uint64_t>(
         "--seed",
         [&](const std::uint64_t& s) {
           config.seed = s;
           flags.seed_given = true;
         },
         "Root seed for every random choice")
      ->default_str(std::to_string(config.seed));
  cmd->add_option("--jobs", config.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--out", config.out, "Output directory")->capture_default_str();
  cmd->add_flag("--standardize,!--no-standardize", config.standardize, "Scale genes to unit variance")
      ->capture_default_str();
  cmd->add_option("--cap-genes", config.cap_genes, "Refuse lasso/adalasso above this many genes")
      ->capture_default_str();
  cmd->add_flag("--timing", config.timing, "Record wall-clock runtimes (outputs are then not reproducible)");
}

void add_grid(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--grid", flags.grid_file, "Scenario grid JSON file");
  cmd->add_option("--densities", flags.densities, "Edge densities, e.g. 0.05,0.1")->delimiter(',');
  cmd->add_option("--topology", flags.topologies, "clusters(c), stars(s) or density(d)")->delimiter(',');
  cmd->add_option("--n", flags.sizes, "Sample sizes")->delimiter(',');
  cmd->add_option("--reps", flags.reps, "Replications per scenario");
  cmd->add_option("--p", flags.p, "Genes per simulated network");
}

void apply_grid(RunConfig& config, const Flags& flags) {
  if (!flags.grid_file.empty()) {
    config.grid = ScenarioGrid::load(flags.grid_file);
    if (!flags.seed_given) config.seed = config.grid.root_seed;
  }
  if (!flags.densities.empty() || !flags.topologies.empty()) {
    config.grid.topologies.clear();
    for (double d : flags.densities) config.grid.topologies.push_back(Topology::random_density(d));
    for (const auto& t : flags.topologies) config.grid.topologies.push_back(Topology::parse(t));
  }
  if (!flags.sizes.empty()) config.grid.sample_sizes = flags.sizes;
  if (flags.reps > 0) config.grid.replications = flags.reps;
  if (flags.p > 0) config.grid.p = flags.p;
  config.grid.root_seed = config.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gene-association networks from regularized partial correlations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig config;
  Flags flags;

  auto* simulate = app.add_subcommand("simulate", "Simulation study: truth, data, estimation and scoring");
  add_common(simulate, config, flags);
  add_grid(simulate, flags);

  auto* roc = app.add_subcommand("roc", "Sensitivity/specificity over fdr thresholds on simulated data");
  add_common(roc, config, flags);
  add_grid(roc, flags);
  roc->add_option("--thresholds", config.roc_thresholds, "fdr thresholds (default 0,0.05,...,1)")->delimiter(',');

  auto* estimate = app.add_subcommand("estimate", "Estimate networks from an expression CSV");
  add_common(estimate, config, flags);
  estimate->add_option("data", config.data, "CSV with observations in rows and genes in columns")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_flag("--header,!--no-header", config.has_header, "First row holds gene labels")->capture_default_str();

  auto* stability = app.add_subcommand("stability", "Subsampling stability (Fleiss' kappa) per method");
  add_common(stability, config, flags);
  stability->add_option("data", config.data, "CSV with observations in rows and genes in columns")
      ->required()
      ->check(CLI::ExistingFile);
  stability->add_flag("--header,!--no-header", config.has_header, "First row holds gene labels")
      ->capture_default_str();
  stability->add_option("--replicates", config.replicates, "Subsamples R")->capture_default_str();
  stability->add_option("--drop", config.drop_fraction, "Fraction of observations left out per subsample")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    config.methods = parse_methods(flags.methods);
    if (simulate->parsed() || roc->parsed()) apply_grid(config, flags);
    if (simulate->parsed()) return cmd_simulate(config, std::cerr);
    if (roc->parsed()) return cmd_roc(config, std::cerr);
    if (estimate->parsed()) return cmd_estimate(config, std::cerr);
    if (stability->parsed()) return cmd_stability(config, std::cerr);
  } catch (const ZeroVariance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
