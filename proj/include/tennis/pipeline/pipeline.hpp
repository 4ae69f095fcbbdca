#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "tennis/pipeline/config.hpp"
#include "tennis/pipeline/manifest.hpp"

namespace tennis::pipeline {

struct StageOptions {
  bool force = false;
  int jobs = 1;
  bool quiet = false;
};

// Stage orchestration: ingest -> fit -> frontier -> metrics -> stats ->
// report, each writing versioned artifacts plus a manifest under
// out_dir/<stage>/. A stage re-runs only when its manifest no longer matches
// the config hash and input hashes (or --force). Running a stage whose
// upstream artifacts are missing or stale raises StageDependencyError.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, StageOptions options);

  void run_stage(const std::string& name);
  void run_all();

  const std::string& effective_config_hash() const { return config_hash_; }

 private:
  void run_ingest();
  void run_fit();
  void run_frontier();
  void run_metrics();
  void run_stats();
  void run_report();

  FileHash input_hash(const std::filesystem::path& path) const;
  FileHash config_input(const std::string& name, const std::string& value) const;
  std::string epsilon_list_string() const;
  bool fresh(const std::filesystem::path& dir, const std::string& stage,
             const std::vector<FileHash>& inputs) const;
  void finalize(const std::filesystem::path& dir, const std::string& stage,
                std::vector<FileHash> inputs, std::vector<std::string> outputs) const;
  StageManifest require_stage(const std::string& stage, const std::string& dir_name) const;
  void log(const std::string& message) const;
  std::string csv_stamp() const;

  PipelineConfig cfg_;
  StageOptions options_;
  std::string config_hash_;
  std::filesystem::path out_;
};

// Monte Carlo sanity run backing the `simulate` subcommand: compares the
// simulated win rate and mean points against the exact chain solution.
struct SimulateOptions {
  double constant_p = 0.6;
  std::string strategy_file;  // JSON array of 18 probabilities; overrides constant_p
  long long games = 1000000;
  std::uint64_t seed = 1;
};

std::string run_simulate(const SimulateOptions& options);

}  // namespace tennis::pipeline
