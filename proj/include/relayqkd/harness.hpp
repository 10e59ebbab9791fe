#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "relayqkd/analytics.hpp"
#include "relayqkd/simulator.hpp"

namespace relayqkd {

struct RunConfig {
  std::size_t n_nodes = 3;
  std::size_t slots = 1000;
  /// One value for every hop, or exactly one value per hop.
  std::vector<double> transmittance{1.0};
  std::string mode = "naive";
  std::size_t batch_size = 1;
  double threshold = 0.0;
  std::optional<std::size_t> eve_link;
  std::uint64_t seed = 1;
  double qber_sample = 1.0;
  std::string output_dir;
  bool trace = false;
  /// Also write records.txt, announcements.txt and relay_messages.txt.
  bool records = false;

  std::vector<std::size_t> sweep_nodes;
  std::vector<double> sweep_transmittance;
  std::vector<std::string> sweep_mode;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  ChainSetup chain_setup() const;
  SummaryOptions summary_options() const;
  bool is_sweep() const noexcept { return !sweep_nodes.empty() || !sweep_transmittance.empty() || !sweep_mode.empty(); }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& reason)
      : std::runtime_error(key + ": " + reason), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Thrown by parse_config for --help; what() is the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses command-line style arguments (without the program name or verb).
/// `--config FILE` loads a TOML/INI key-value file whose keys are the long
/// option names; flags given on the command line override file values and
/// unknown keys are rejected.
RunConfig parse_config(const std::vector<std::string>& args);

/// Sub-seed for a sweep child, mixed from the master seed and the child's
/// canonical label so that removing other axis values leaves it unchanged.
std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& child_label);

struct RunResult {
  RunSummary summary;
  RunArtifacts artifacts;
};

/// Simulation, post-processing and analytics for one configuration. Writes
/// summary.txt (plus trace.csv and the record files when enabled) under
/// output_dir if it is set.
RunResult run(const RunConfig& config);

/// Flat "key = value" document with stable field names and fixed precision.
std::string render_summary(const RunConfig& config, const RunSummary& summary);

/// Summary of a post-processed record fixture, with no simulation config.
std::string render_summary(const RunSummary& summary);

struct SweepChild {
  std::string label;
  std::uint64_t seed = 0;
  RunConfig config;
};

/// Cartesian product nodes x transmittance x mode; missing axes take the base value.
std::vector<SweepChild> expand_sweep(const RunConfig& base);

struct SweepResult {
  std::vector<SweepChild> children;
  std::vector<RunSummary> summaries;
};

/// Runs every child. With output_dir set, child i writes to output_dir/<label>
/// and sweep_index.txt lists label, seed and summary path per child.
SweepResult sweep(const RunConfig& base);

}  // namespace relayqkd
