#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcornet/ggm.hpp"
#include "pcornet/netgen.hpp"

namespace pcornet {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::vector<Method> methods = all_methods();
  int k = 5;
  double fdr_threshold = 0.2;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: OpenMP default
  std::filesystem::path out = "pcornet_out";
  bool standardize = true;
  Index cap_genes = 2000;
  bool timing = false;

  // simulate, roc
  ScenarioGrid grid;
  std::vector<double> roc_thresholds;  // empty: 0, 0.05, ..., 1

  // estimate, stability
  std::filesystem::path data;
  bool has_header = true;
  int replicates = 10;
  double drop_fraction = 0.1;

  void validate() const;
};

/// Each command writes its files under config.out plus manifest.json and
/// returns the process exit code: 0 when every requested cell completed.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_estimate(const RunConfig& config, std::ostream& log);
int cmd_stability(const RunConfig& config, std::ostream& log);
int cmd_roc(const RunConfig& config, std::ostream& log);

/// Config, seed and library versions; independent of the worker count.
std::string manifest_json(const RunConfig& config, const std::string& command);

}  // namespace pcornet
