#include "tennis/pipeline/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tennis/errors.hpp"
#include "tennis/rng.hpp"

namespace tennis::pipeline {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

int to_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + value + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "' expects true/false, got '" + value + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError("key '" + key + "' expects a comma-separated list");
  return out;
}

bool apply_schema_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  auto& p = cfg.points;
  auto& m = cfg.matches;
  static const std::map<std::string, std::string ingest::PointsSchema::*> kPoints = {
      {"points.match_id", &ingest::PointsSchema::match_id},
      {"points.set_no", &ingest::PointsSchema::set_no},
      {"points.game_no", &ingest::PointsSchema::game_no},
      {"points.point_no", &ingest::PointsSchema::point_no},
      {"points.point_winner", &ingest::PointsSchema::point_winner},
      {"points.point_server", &ingest::PointsSchema::point_server},
      {"points.set_winner", &ingest::PointsSchema::set_winner},
      {"points.p1_score", &ingest::PointsSchema::p1_score},
      {"points.p2_score", &ingest::PointsSchema::p2_score},
      {"points.tiebreak", &ingest::PointsSchema::tiebreak},
  };
  static const std::map<std::string, std::string ingest::MatchesSchema::*> kMatches = {
      {"matches.match_id", &ingest::MatchesSchema::match_id},
      {"matches.player1", &ingest::MatchesSchema::player1},
      {"matches.player2", &ingest::MatchesSchema::player2},
      {"matches.status", &ingest::MatchesSchema::status},
      {"matches.winner", &ingest::MatchesSchema::winner},
  };
  if (const auto it = kPoints.find(key); it != kPoints.end()) {
    p.*(it->second) = value;
    return true;
  }
  if (const auto it = kMatches.find(key); it != kMatches.end()) {
    m.*(it->second) = value;
    return true;
  }
  if (key == "matches.men_prefix") {
    m.men_prefix = to_int(key, value);
    return true;
  }
  if (key == "matches.women_prefix") {
    m.women_prefix = to_int(key, value);
    return true;
  }
  return false;
}

bool apply_category_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key.rfind("category.", 0) != 0) return false;
  const std::string rest = key.substr(9);
  const auto dot = rest.find('.');
  if (dot == std::string::npos) throw ConfigError("malformed category key '" + key + "'");
  const std::string name = rest.substr(0, dot);
  const std::string field = rest.substr(dot + 1);
  const auto it = cfg.categories.find(name);
  if (it == cfg.categories.end()) {
    throw ConfigError("unknown category '" + name + "' in key '" + key + "'");
  }
  CategoryConfig& c = it->second;
  if (field == "search_lo") c.search_lo = to_double(key, value);
  else if (field == "search_hi") c.search_hi = to_double(key, value);
  else if (field == "population") c.population = to_int(key, value);
  else if (field == "max_generations") c.max_generations = to_int(key, value);
  else if (field == "function_tolerance") c.function_tolerance = to_double(key, value);
  else if (field == "crossover_rate") c.crossover_rate = to_double(key, value);
  else if (field == "pareto_fraction") c.pareto_fraction = to_double(key, value);
  else if (field == "n_seeds") c.n_seeds = to_int(key, value);
  else throw ConfigError("unknown category field in key '" + key + "'");
  return true;
}

void apply_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data_dir") cfg.data_dir = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "min_matches") cfg.min_matches = to_int(key, value);
  else if (key == "master_seed") cfg.master_seed = to_u64(key, value);
  else if (key == "tier_low") cfg.tier_low = to_double(key, value);
  else if (key == "tier_high") cfg.tier_high = to_double(key, value);
  else if (key == "profile") cfg.profile = value;
  else if (key == "weighted_constraint") cfg.weighted_constraint = to_bool(key, value);
  else if (key == "distance_mode") cfg.distance_mode = value;
  else if (key == "lilliefors_replicates") cfg.lilliefors_replicates = to_int(key, value);
  else if (key == "bootstrap_iterations") cfg.bootstrap_iterations = to_int(key, value);
  else if (key == "expect_corpus_magnitudes") cfg.expect_corpus_magnitudes = to_bool(key, value);
  else if (key == "players") cfg.players_filter = value;
  else if (key == "kernel") cfg.kernel = value;
  else if (key == "epsilon_list") cfg.epsilon_list = to_double_list(key, value);
  else if (apply_schema_key(cfg, key, value)) return;
  else if (apply_category_key(cfg, key, value)) return;
  else throw ConfigError("unknown config key '" + key + "'");
}

void validate(const PipelineConfig& cfg) {
  if (cfg.profile != "full" && cfg.profile != "reduced") {
    throw ConfigError("profile must be 'full' or 'reduced'");
  }
  if (cfg.distance_mode != "curve" && cfg.distance_mode != "points") {
    throw ConfigError("distance_mode must be 'curve' or 'points'");
  }
  if (cfg.kernel != "auto" && cfg.kernel != "scalar" && cfg.kernel != "avx2") {
    throw ConfigError("kernel must be 'auto', 'scalar' or 'avx2'");
  }
  if (cfg.epsilon_list.empty()) throw ConfigError("epsilon_list must not be empty");
  for (double eps : cfg.epsilon_list) {
    if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("epsilon values must lie in (0, 0.5)");
  }
  if (cfg.min_matches < 1) throw ConfigError("min_matches must be positive");
  if (!(cfg.tier_low > 0.0 && cfg.tier_low <= cfg.tier_high && cfg.tier_high < 1.0)) {
    throw ConfigError("tier boundaries must satisfy 0 < tier_low <= tier_high < 1");
  }
  if (cfg.lilliefors_replicates < 100) throw ConfigError("lilliefors_replicates too small");
  if (cfg.bootstrap_iterations < 10) throw ConfigError("bootstrap_iterations too small");
  for (const auto& [name, c] : cfg.categories) {
    if (!(c.search_lo >= 0.0 && c.search_hi <= 1.0 && c.search_lo < c.search_hi)) {
      throw ConfigError("category " + name + " has an invalid search range");
    }
    if (c.population < 4 || c.population % 2 != 0) {
      throw ConfigError("category " + name + " population must be an even number >= 4");
    }
    if (c.max_generations < 1 || c.n_seeds < 1) {
      throw ConfigError("category " + name + " needs positive generations and seeds");
    }
  }
}

}  // namespace

PipelineConfig default_config() {
  PipelineConfig cfg;
  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      cfg.categories[category_key(tour, role)] = default_category(tour, role);
    }
  }
  return cfg;
}

void apply_profile(PipelineConfig& cfg) {
  if (cfg.profile == "reduced") {
    for (auto& [name, c] : cfg.categories) c = reduced_profile(c);
  }
  validate(cfg);
}

PipelineConfig parse_config(const std::string& content) {
  PipelineConfig cfg = default_config();
  std::map<std::string, std::string> reduced_overrides;

  std::stringstream ss(content);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (key.rfind("reduced.", 0) == 0) {
      reduced_overrides[key.substr(8)] = value;
    } else {
      apply_key(cfg, key, value);
    }
  }

  apply_profile(cfg);
  if (cfg.profile == "reduced") {
    for (const auto& [key, value] : reduced_overrides) apply_key(cfg, key, value);
    validate(cfg);
  }
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

CategoryConfig PipelineConfig::category(Tour tour, Role role) const {
  CategoryConfig c = categories.at(category_key(tour, role));
  c.weighted_constraint = weighted_constraint;
  return c;
}

metrics::DistanceMode PipelineConfig::metric_distance_mode() const {
  return distance_mode == "points" ? metrics::DistanceMode::PointSet
                                   : metrics::DistanceMode::Curve;
}

bool PipelineConfig::player_selected(const std::string& name) const {
  if (players_filter.empty()) return true;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  const std::string hay = lower(name);
  std::stringstream ss(players_filter);
  std::string needle;
  while (std::getline(ss, needle, ',')) {
    needle = lower(trim(needle));
    if (!needle.empty() && hay.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string canonical_config_string(const PipelineConfig& cfg) {
  // Stage-local knobs (master_seed, epsilon_list, players, distance_mode,
  // replicate counts) are tracked as per-stage manifest inputs instead, so a
  // filtered or re-seeded downstream run never invalidates ingested data.
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("data_dir", cfg.data_dir);
  kv.emplace_back("min_matches", std::to_string(cfg.min_matches));
  kv.emplace_back("tier_low", format_double(cfg.tier_low));
  kv.emplace_back("tier_high", format_double(cfg.tier_high));
  kv.emplace_back("profile", cfg.profile);
  kv.emplace_back("weighted_constraint", cfg.weighted_constraint ? "true" : "false");
  kv.emplace_back("expect_corpus_magnitudes", cfg.expect_corpus_magnitudes ? "true" : "false");
  kv.emplace_back("state_order", std::string(kStateOrderVersion));
  kv.emplace_back("points.match_id", cfg.points.match_id);
  kv.emplace_back("points.set_no", cfg.points.set_no);
  kv.emplace_back("points.game_no", cfg.points.game_no);
  kv.emplace_back("points.point_no", cfg.points.point_no);
  kv.emplace_back("points.point_winner", cfg.points.point_winner);
  kv.emplace_back("points.point_server", cfg.points.point_server);
  kv.emplace_back("points.set_winner", cfg.points.set_winner);
  kv.emplace_back("points.p1_score", cfg.points.p1_score);
  kv.emplace_back("points.p2_score", cfg.points.p2_score);
  kv.emplace_back("points.tiebreak", cfg.points.tiebreak);
  kv.emplace_back("matches.match_id", cfg.matches.match_id);
  kv.emplace_back("matches.player1", cfg.matches.player1);
  kv.emplace_back("matches.player2", cfg.matches.player2);
  kv.emplace_back("matches.status", cfg.matches.status);
  kv.emplace_back("matches.winner", cfg.matches.winner);
  kv.emplace_back("matches.men_prefix", std::to_string(cfg.matches.men_prefix));
  kv.emplace_back("matches.women_prefix", std::to_string(cfg.matches.women_prefix));
  for (const auto& [name, c] : cfg.categories) {
    const std::string prefix = "category." + name + ".";
    kv.emplace_back(prefix + "search_lo", format_double(c.search_lo));
    kv.emplace_back(prefix + "search_hi", format_double(c.search_hi));
    kv.emplace_back(prefix + "population", std::to_string(c.population));
    kv.emplace_back(prefix + "max_generations", std::to_string(c.max_generations));
    kv.emplace_back(prefix + "function_tolerance", format_double(c.function_tolerance));
    kv.emplace_back(prefix + "crossover_rate", format_double(c.crossover_rate));
    kv.emplace_back(prefix + "pareto_fraction", format_double(c.pareto_fraction));
    kv.emplace_back(prefix + "n_seeds", std::to_string(c.n_seeds));
  }
  std::sort(kv.begin(), kv.end());
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

std::string config_hash(const PipelineConfig& cfg) {
  const std::uint64_t h = fnv1a64(canonical_config_string(cfg));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace tennis::pipeline
