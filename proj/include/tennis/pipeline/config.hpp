#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tennis/category.hpp"
#include "tennis/ingest/ingest.hpp"
#include "tennis/metrics/metrics.hpp"

namespace tennis::pipeline {

// One source of truth for a run. Loaded from a key = value file (see
// load_config), overridable by CLI flags, then frozen; the canonical string
// of the effective config is hashed into every stage manifest.
struct PipelineConfig {
  std::string data_dir = "data";
  std::string out_dir = "out";

  ingest::PointsSchema points;
  ingest::MatchesSchema matches;
  int min_matches = 30;

  // Four category configs keyed men_service, men_return, women_service,
  // women_return; epsilon comes from epsilon_list at run time.
  std::map<std::string, CategoryConfig> categories;
  std::vector<double> epsilon_list = {0.005};

  // Match-winning percentage boundaries; both belong to the middle tier.
  double tier_low = 0.50;
  double tier_high = 0.70;

  std::uint64_t master_seed = 20122022;
  std::string profile = "full";  // "full" | "reduced"
  bool weighted_constraint = true;
  std::string distance_mode = "curve";  // "curve" | "points"
  int lilliefors_replicates = 10000;
  int bootstrap_iterations = 1000;
  bool expect_corpus_magnitudes = false;
  std::string players_filter;  // comma-separated substrings, empty = all
  std::string kernel = "auto";  // "auto" | "scalar" | "avx2"

  CategoryConfig category(Tour tour, Role role) const;
  metrics::DistanceMode metric_distance_mode() const;
  bool player_selected(const std::string& name) const;
};

PipelineConfig default_config();

// Grammar: one `key = value` per line, `#` comments, blank lines ignored.
// Keys prefixed `reduced.` apply only when the effective profile is
// "reduced", after the built-in reduced overrides (population 200,
// max_generations 100, n_seeds 5). Unknown keys are errors.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& content);

// Re-applies profile defaults; call after changing cfg.profile.
void apply_profile(PipelineConfig& cfg);

// Deterministic serialization of the effective configuration (excludes
// out_dir, which only locates the cache it is hashed into).
std::string canonical_config_string(const PipelineConfig& cfg);
std::string config_hash(const PipelineConfig& cfg);

// Shortest round-trip decimal rendering, used for every number we write.
std::string format_double(double value);

}  // namespace tennis::pipeline
