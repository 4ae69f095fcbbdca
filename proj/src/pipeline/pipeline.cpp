#include "tennis/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tennis/errors.hpp"
#include "tennis/fit/model_fit.hpp"
#include "tennis/game_chain.hpp"
#include "tennis/ingest/csv.hpp"
#include "tennis/ingest/ingest.hpp"
#include "tennis/kernels/game_kernel.hpp"
#include "tennis/metrics/metrics.hpp"
#include "tennis/opt/pareto.hpp"
#include "tennis/pipeline/manifest.hpp"
#include "tennis/rng.hpp"
#include "tennis/simulate.hpp"
#include "tennis/stats/stats.hpp"

namespace tennis::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) { return format_double(v); }

std::string epsilon_tag(double eps) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", eps);
  return std::string(buf);
}

std::string sanitize_name(const std::string& name) {
  std::string out;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      out.push_back('_');
    }
  }
  char suffix[12];
  std::snprintf(suffix, sizeof(suffix), "-%08llx",
                static_cast<unsigned long long>(fnv1a64(name) & 0xffffffffULL));
  return out + suffix;
}

double parse_double_field(const std::string& s) {
  return std::stod(s);
}

long long parse_ll_field(const std::string& s) { return std::stoll(s); }

int require_col(const ingest::CsvTable& t, const std::string& name, const std::string& file) {
  const int c = t.column(name);
  if (c < 0) throw SchemaError(name + " (in " + file + ")");
  return c;
}

// ---- artifact row types shared between stages ----

struct MatchStatsRow {
  std::string player;
  Tour tour = Tour::Men;
  Role role = Role::Service;
  std::string match_id;
  long long games = 0;
  long long games_won = 0;
  long long points = 0;
};

struct StrategyRow {
  std::string player;
  Tour tour = Tour::Men;
  Role role = Role::Service;
  double average_pwp = 0.0;
  StrategyVector score_dependent;
  std::vector<int> imputed;
};

struct MetricsRow {
  std::string player;
  Tour tour = Tour::Men;
  Role role = Role::Service;
  double epsilon = 0.0;
  ingest::Tier tier = ingest::Tier::Low;
  long long matches = 0;
  double match_win_pct = 0.0;
  double average_pwp = 0.0;
  double game_win_prob = 0.0;
  double expected_points = 0.0;
  double efficiency = 0.0;
  double efficiency_distance = 0.0;
  double strategy_fit = 0.0;
  double strategy_fit_distance = 0.0;
  double optimal_contrast = 0.0;
  std::string flags;
};

Tour tour_of(const std::string& s) {
  const auto t = tour_from_name(s);
  if (!t) throw std::runtime_error("bad tour token: " + s);
  return *t;
}

Role role_of(const std::string& s) {
  const auto r = role_from_name(s);
  if (!r) throw std::runtime_error("bad role token: " + s);
  return *r;
}

std::string tallies_file_name(Tour tour, Role role) {
  return "tallies_" + category_key(tour, role) + ".csv";
}

std::vector<ingest::PlayerTallies> read_tallies_dir(const fs::path& dir) {
  std::vector<ingest::PlayerTallies> rows;
  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      const fs::path file = dir / tallies_file_name(tour, role);
      std::ifstream in(file);
      if (!in) throw StageDependencyError("missing tallies file: " + file.string());
      const auto table = ingest::read_csv(in);
      const int c_player = require_col(table, "player", file.string());
      const int c_matches = require_col(table, "matches", file.string());
      const int c_games = require_col(table, "games", file.string());
      const int c_wins = require_col(table, "match_wins", file.string());
      std::array<int, 18> c_played{};
      std::array<int, 18> c_won{};
      for (int i = 0; i < 18; ++i) {
        c_played[static_cast<std::size_t>(i)] =
            require_col(table, "played_" + std::to_string(i), file.string());
        c_won[static_cast<std::size_t>(i)] =
            require_col(table, "won_" + std::to_string(i), file.string());
      }
      for (const auto& row : table.rows) {
        ingest::PlayerTallies t;
        t.player = row[static_cast<std::size_t>(c_player)];
        t.tour = tour;
        t.role = role;
        for (int i = 0; i < 18; ++i) {
          t.per_state[static_cast<std::size_t>(i)].played =
              parse_ll_field(row[static_cast<std::size_t>(c_played[static_cast<std::size_t>(i)])]);
          t.per_state[static_cast<std::size_t>(i)].won =
              parse_ll_field(row[static_cast<std::size_t>(c_won[static_cast<std::size_t>(i)])]);
        }
        t.matches = parse_ll_field(row[static_cast<std::size_t>(c_matches)]);
        t.games = parse_ll_field(row[static_cast<std::size_t>(c_games)]);
        t.match_wins = parse_ll_field(row[static_cast<std::size_t>(c_wins)]);
        t.match_losses = t.matches - t.match_wins;
        rows.push_back(std::move(t));
      }
    }
  }
  return rows;
}

std::vector<MatchStatsRow> read_matchstats(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw StageDependencyError("missing match stats file: " + file.string());
  const auto table = ingest::read_csv(in);
  const int c_player = require_col(table, "player", file.string());
  const int c_tour = require_col(table, "tour", file.string());
  const int c_role = require_col(table, "role", file.string());
  const int c_match = require_col(table, "match_id", file.string());
  const int c_games = require_col(table, "games", file.string());
  const int c_won = require_col(table, "games_won", file.string());
  const int c_points = require_col(table, "points", file.string());
  std::vector<MatchStatsRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    MatchStatsRow r;
    r.player = row[static_cast<std::size_t>(c_player)];
    r.tour = tour_of(row[static_cast<std::size_t>(c_tour)]);
    r.role = role_of(row[static_cast<std::size_t>(c_role)]);
    r.match_id = row[static_cast<std::size_t>(c_match)];
    r.games = parse_ll_field(row[static_cast<std::size_t>(c_games)]);
    r.games_won = parse_ll_field(row[static_cast<std::size_t>(c_won)]);
    r.points = parse_ll_field(row[static_cast<std::size_t>(c_points)]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<StrategyRow> read_strategies(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw StageDependencyError("missing strategies file: " + file.string());
  const auto table = ingest::read_csv(in);
  const int c_player = require_col(table, "player", file.string());
  const int c_tour = require_col(table, "tour", file.string());
  const int c_role = require_col(table, "role", file.string());
  const int c_avg = require_col(table, "average_pwp", file.string());
  const int c_imputed = require_col(table, "imputed_states", file.string());
  std::array<int, 18> c_p{};
  for (int i = 0; i < 18; ++i) {
    c_p[static_cast<std::size_t>(i)] = require_col(table, "p_" + std::to_string(i), file.string());
  }
  std::vector<StrategyRow> rows;
  for (const auto& row : table.rows) {
    StrategyRow r;
    r.player = row[static_cast<std::size_t>(c_player)];
    r.tour = tour_of(row[static_cast<std::size_t>(c_tour)]);
    r.role = role_of(row[static_cast<std::size_t>(c_role)]);
    r.average_pwp = parse_double_field(row[static_cast<std::size_t>(c_avg)]);
    for (int i = 0; i < 18; ++i) {
      r.score_dependent[i] =
          parse_double_field(row[static_cast<std::size_t>(c_p[static_cast<std::size_t>(i)])]);
    }
    std::stringstream ss(row[static_cast<std::size_t>(c_imputed)]);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      if (!tok.empty()) r.imputed.push_back(std::stoi(tok));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsRow> read_metrics(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw StageDependencyError("missing metrics file: " + file.string());
  const auto table = ingest::read_csv(in);
  auto col = [&](const char* name) { return require_col(table, name, file.string()); };
  const int c_player = col("player"), c_tour = col("tour"), c_role = col("role");
  const int c_eps = col("epsilon"), c_tier = col("tier"), c_matches = col("matches");
  const int c_wpct = col("match_win_pct"), c_avg = col("average_pwp");
  const int c_win = col("game_win_prob"), c_pts = col("expected_points");
  const int c_eff = col("efficiency"), c_effd = col("efficiency_distance");
  const int c_fit = col("strategy_fit"), c_fitd = col("strategy_fit_distance");
  const int c_con = col("optimal_contrast"), c_flags = col("flags");
  std::vector<MetricsRow> rows;
  for (const auto& row : table.rows) {
    MetricsRow r;
    auto f = [&](int c) { return row[static_cast<std::size_t>(c)]; };
    r.player = f(c_player);
    r.tour = tour_of(f(c_tour));
    r.role = role_of(f(c_role));
    r.epsilon = parse_double_field(f(c_eps));
    const std::string tier = f(c_tier);
    r.tier = tier == "low" ? ingest::Tier::Low
                           : (tier == "mid" ? ingest::Tier::Mid : ingest::Tier::High);
    r.matches = parse_ll_field(f(c_matches));
    r.match_win_pct = parse_double_field(f(c_wpct));
    r.average_pwp = parse_double_field(f(c_avg));
    r.game_win_prob = parse_double_field(f(c_win));
    r.expected_points = parse_double_field(f(c_pts));
    r.efficiency = parse_double_field(f(c_eff));
    r.efficiency_distance = parse_double_field(f(c_effd));
    r.strategy_fit = parse_double_field(f(c_fit));
    r.strategy_fit_distance = parse_double_field(f(c_fitd));
    r.optimal_contrast = parse_double_field(f(c_con));
    r.flags = f(c_flags);
    rows.push_back(std::move(r));
  }
  return rows;
}

opt::Frontier read_frontier_doc(const fs::path& file, json* doc_out = nullptr) {
  std::ifstream in(file);
  if (!in) throw StageDependencyError("missing frontier file: " + file.string());
  json doc;
  in >> doc;
  opt::Frontier frontier;
  for (const auto& p : doc.at("points")) {
    opt::FrontierPoint fp;
    fp.outcome.win = p.at("win").get<double>();
    fp.outcome.points = p.at("expected_points").get<double>();
    fp.seed = p.at("seed").get<std::uint64_t>();
    const auto& strat = p.at("strategy");
    for (int i = 0; i < 18; ++i) fp.strategy[i] = strat.at(static_cast<std::size_t>(i)).get<double>();
    frontier.points.push_back(std::move(fp));
  }
  if (doc_out != nullptr) *doc_out = std::move(doc);
  return frontier;
}

struct ObservedOutcome {
  double win = 0.0;
  double points = 0.0;
  long long games = 0;
};

std::map<std::string, ObservedOutcome> observed_outcomes(const std::vector<MatchStatsRow>& rows) {
  struct Acc {
    long long games = 0, won = 0, points = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& r : rows) {
    auto& a = acc[std::string(tour_name(r.tour)) + "/" + std::string(role_name(r.role)) + "/" +
                  r.player];
    a.games += r.games;
    a.won += r.games_won;
    a.points += r.points;
  }
  std::map<std::string, ObservedOutcome> out;
  for (const auto& [key, a] : acc) {
    if (a.games <= 0) continue;
    ObservedOutcome o;
    o.games = a.games;
    o.win = static_cast<double>(a.won) / static_cast<double>(a.games);
    o.points = static_cast<double>(a.points) / static_cast<double>(a.games);
    out[key] = o;
  }
  return out;
}

std::string outcome_key(Tour tour, Role role, const std::string& player) {
  return std::string(tour_name(tour)) + "/" + std::string(role_name(role)) + "/" + player;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig cfg, StageOptions options)
    : cfg_(std::move(cfg)), options_(options), config_hash_(config_hash(cfg_)),
      out_(cfg_.out_dir) {
  if (const auto impl = kernels::impl_from_name(cfg_.kernel)) {
    kernels::set_impl_override(*impl);
  } else {
    kernels::set_impl_override(std::nullopt);
  }
}

void Pipeline::log(const std::string& message) const {
  if (!options_.quiet) std::cerr << message << '\n';
}

std::string Pipeline::csv_stamp() const {
  return "# config_hash=" + config_hash_ + " state_order=" + std::string(kStateOrderVersion) +
         " profile=" + cfg_.profile + "\n";
}

FileHash Pipeline::config_input(const std::string& name, const std::string& value) const {
  return {"config:" + name, hash_bytes(value)};
}

std::string Pipeline::epsilon_list_string() const {
  std::string eps;
  for (double e : cfg_.epsilon_list) {
    if (!eps.empty()) eps += ",";
    eps += fmt(e);
  }
  return eps;
}

FileHash Pipeline::input_hash(const fs::path& path) const {
  std::error_code ec;
  const fs::path rel = fs::relative(path, out_, ec);
  std::string key = path.string();
  if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0) key = rel.string();
  return {key, hash_file(path)};
}

bool Pipeline::fresh(const fs::path& dir, const std::string& stage,
                     const std::vector<FileHash>& inputs) const {
  if (options_.force) return false;
  StageManifest m;
  if (!load_manifest(dir / "manifest.json", m)) return false;
  if (m.stage != stage || m.config_hash != config_hash_ ||
      m.state_order != kStateOrderVersion || m.inputs != inputs) {
    return false;
  }
  for (const auto& out : m.outputs) {
    const fs::path path = out_ / out.path;
    std::error_code ec;
    if (!fs::exists(path, ec)) return false;
    if (hash_file(path) != out.hash) return false;
  }
  return true;
}

void Pipeline::finalize(const fs::path& dir, const std::string& stage,
                        std::vector<FileHash> inputs, std::vector<std::string> outputs) const {
  StageManifest m;
  m.stage = stage;
  m.profile = cfg_.profile;
  m.config_hash = config_hash_;
  m.state_order = std::string(kStateOrderVersion);
  m.master_seed = cfg_.master_seed;
  m.inputs = std::move(inputs);
  std::sort(outputs.begin(), outputs.end());
  for (const auto& rel : outputs) {
    m.outputs.push_back({rel, hash_file(out_ / rel)});
  }
  save_manifest(dir / "manifest.json", m);
}

StageManifest Pipeline::require_stage(const std::string& stage,
                                      const std::string& dir_name) const {
  StageManifest m;
  if (!load_manifest(out_ / dir_name / "manifest.json", m)) {
    throw StageDependencyError("stage '" + stage + "' has no artifacts under " +
                               (out_ / dir_name).string() + "; run `tennisfront " + stage +
                               "` first");
  }
  if (m.config_hash != config_hash_) {
    throw StageDependencyError("artifacts of stage '" + stage +
                               "' were built with a different configuration; rerun "
                               "`tennisfront " +
                               stage + "` (or pass --force to `all`)");
  }
  return m;
}

void Pipeline::run_stage(const std::string& name) {
  if (name == "ingest") run_ingest();
  else if (name == "fit") run_fit();
  else if (name == "frontier") run_frontier();
  else if (name == "metrics") run_metrics();
  else if (name == "stats") run_stats();
  else if (name == "report") run_report();
  else throw ConfigError("unknown stage: " + name);
}

void Pipeline::run_all() {
  for (const char* stage : {"ingest", "fit", "frontier", "metrics", "stats", "report"}) {
    run_stage(stage);
  }
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

namespace {

struct PlayerAgg {
  Tour tour = Tour::Men;
  std::string name;
  long long matches = 0;
  long long wins = 0;
  std::array<ingest::PlayerTallies, 2> by_role{};  // [0] service, [1] return
};

struct IngestCounters {
  ingest::FilterReport filter;
  long long tiebreak_games = 0;
  long long incomplete_games = 0;
  long long completed_games = 0;
  long long tallied_points = 0;
  long long point_rows = 0;
  long long rejects = 0;
  long long seg_failures = 0;
};

struct FileResult {
  std::map<std::string, PlayerAgg> players;  // key tour/name
  std::vector<MatchStatsRow> matchrows;
  IngestCounters counters;
  std::vector<json> reject_samples;
  std::vector<std::string> seg_failure_samples;
};

// One matches/points file pair, processed independently of every other pair;
// results merge deterministically in file order.
FileResult process_file_pair(const fs::path& matches_file, const fs::path& points_file,
                             const ingest::MatchesSchema& matches_schema,
                             const ingest::PointsSchema& points_schema) {
  FileResult result;

  std::ifstream matches_in(matches_file);
  if (!matches_in) throw EmptyInputError("cannot open " + matches_file.string());
  const auto parsed_matches = ingest::parse_matches(matches_in, matches_schema);

  std::ifstream points_in(points_file);
  if (!points_in) throw EmptyInputError("cannot open " + points_file.string());
  const auto parsed_points = ingest::parse_points(points_in, points_schema);
  result.counters.point_rows = static_cast<long long>(parsed_points.points.size());

  for (const auto& rej : parsed_matches.rejects) {
    ++result.counters.rejects;
    if (result.reject_samples.size() < 100) {
      result.reject_samples.push_back({{"file", matches_file.filename().string()},
                                       {"row", rej.row},
                                       {"reason", rej.reason}});
    }
  }
  for (const auto& rej : parsed_points.rejects) {
    ++result.counters.rejects;
    if (result.reject_samples.size() < 100) {
      result.reject_samples.push_back({{"file", points_file.filename().string()},
                                       {"row", rej.row},
                                       {"reason", rej.reason}});
    }
  }

  std::map<std::string, std::vector<ingest::RawPoint>> by_match;
  for (const auto& pt : parsed_points.points) by_match[pt.match_id].push_back(pt);

  std::map<std::string, ingest::MatchPointInfo> point_info;
  for (const auto& [id, pts] : by_match) {
    ingest::MatchPointInfo info;
    info.has_points = !pts.empty();
    std::map<int, int> set_winner_by_set;
    for (const auto& pt : pts) {
      if (pt.set_winner != 0) set_winner_by_set[pt.set_no] = pt.set_winner;
    }
    for (const auto& [set_no, slot] : set_winner_by_set) {
      ++info.set_wins[static_cast<std::size_t>(slot - 1)];
    }
    point_info[id] = info;
  }

  auto filtered = ingest::filter_matches(parsed_matches.matches, point_info, matches_schema, 1);
  result.counters.filter.total = filtered.report.total;
  result.counters.filter.retired = filtered.report.retired;
  result.counters.filter.walkover = filtered.report.walkover;
  result.counters.filter.not_singles = filtered.report.not_singles;
  result.counters.filter.no_points = filtered.report.no_points;
  result.counters.filter.winner_unknown = filtered.report.winner_unknown;

  std::stable_sort(filtered.matches.begin(), filtered.matches.end(),
                   [](const ingest::RetainedMatch& a, const ingest::RetainedMatch& b) {
                     return a.meta.match_id < b.meta.match_id;
                   });

  for (const auto& match : filtered.matches) {
    const auto& pts = by_match.at(match.meta.match_id);
    std::vector<ingest::SegmentedGame> games;
    try {
      games = ingest::segment_games(match.meta.match_id, pts);
    } catch (const SegmentationError& e) {
      ++result.counters.seg_failures;
      if (result.seg_failure_samples.size() < 100) result.seg_failure_samples.push_back(e.what());
      continue;
    }
    ++result.counters.filter.retained;

    const std::array<std::string, 2> names = {match.meta.player1, match.meta.player2};
    std::array<std::array<MatchStatsRow, 2>, 2> stats;  // [slot-1][role]
    for (int slot = 1; slot <= 2; ++slot) {
      for (int role = 0; role < 2; ++role) {
        auto& row = stats[static_cast<std::size_t>(slot - 1)][static_cast<std::size_t>(role)];
        row.player = names[static_cast<std::size_t>(slot - 1)];
        row.tour = match.tour;
        row.role = role == 0 ? Role::Service : Role::Return;
        row.match_id = match.meta.match_id;
      }
    }

    auto agg_for = [&](int slot) -> PlayerAgg& {
      const std::string key =
          std::string(tour_name(match.tour)) + "/" + names[static_cast<std::size_t>(slot - 1)];
      PlayerAgg& agg = result.players[key];
      if (agg.name.empty()) {
        agg.tour = match.tour;
        agg.name = names[static_cast<std::size_t>(slot - 1)];
      }
      return agg;
    };

    for (const auto& game : games) {
      if (game.tiebreak) {
        ++result.counters.tiebreak_games;
        continue;
      }
      const int server = game.server_slot;
      const int returner = server == 1 ? 2 : 1;
      ingest::accumulate_game(agg_for(server).by_role[0], game, true);
      ingest::accumulate_game(agg_for(returner).by_role[1], game, false);
      result.counters.tallied_points += static_cast<long long>(game.points.size());
      if (!game.complete) {
        ++result.counters.incomplete_games;
        continue;
      }
      ++result.counters.completed_games;
      auto& srow = stats[static_cast<std::size_t>(server - 1)][0];
      auto& rrow = stats[static_cast<std::size_t>(returner - 1)][1];
      ++srow.games;
      ++rrow.games;
      srow.points += static_cast<long long>(game.points.size());
      rrow.points += static_cast<long long>(game.points.size());
      if (game.server_won_game) ++srow.games_won;
      else ++rrow.games_won;
    }

    for (int slot = 1; slot <= 2; ++slot) {
      PlayerAgg& agg = agg_for(slot);
      ++agg.matches;
      if (match.winner_slot == slot) ++agg.wins;
      for (int role = 0; role < 2; ++role) {
        result.matchrows.push_back(
            stats[static_cast<std::size_t>(slot - 1)][static_cast<std::size_t>(role)]);
      }
    }
  }
  return result;
}

void merge_counters(IngestCounters& into, const IngestCounters& from) {
  into.filter.total += from.filter.total;
  into.filter.retired += from.filter.retired;
  into.filter.walkover += from.filter.walkover;
  into.filter.not_singles += from.filter.not_singles;
  into.filter.no_points += from.filter.no_points;
  into.filter.winner_unknown += from.filter.winner_unknown;
  into.filter.retained += from.filter.retained;
  into.tiebreak_games += from.tiebreak_games;
  into.incomplete_games += from.incomplete_games;
  into.completed_games += from.completed_games;
  into.tallied_points += from.tallied_points;
  into.point_rows += from.point_rows;
  into.rejects += from.rejects;
  into.seg_failures += from.seg_failures;
}

void merge_players(std::map<std::string, PlayerAgg>& into,
                   const std::map<std::string, PlayerAgg>& from) {
  for (const auto& [key, src] : from) {
    PlayerAgg& dst = into[key];
    if (dst.name.empty()) {
      dst.tour = src.tour;
      dst.name = src.name;
    }
    dst.matches += src.matches;
    dst.wins += src.wins;
    for (int role = 0; role < 2; ++role) {
      auto& dt = dst.by_role[static_cast<std::size_t>(role)];
      const auto& st = src.by_role[static_cast<std::size_t>(role)];
      for (int i = 0; i < 18; ++i) {
        dt.per_state[static_cast<std::size_t>(i)].played +=
            st.per_state[static_cast<std::size_t>(i)].played;
        dt.per_state[static_cast<std::size_t>(i)].won +=
            st.per_state[static_cast<std::size_t>(i)].won;
      }
      dt.games += st.games;
    }
  }
}

}  // namespace

void Pipeline::run_ingest() {
  const fs::path dir = out_ / "tallies";

  std::vector<std::pair<fs::path, fs::path>> file_pairs;  // (matches, points)
  {
    std::vector<fs::path> all;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(cfg_.data_dir, ec)) {
      if (entry.is_regular_file()) all.push_back(entry.path());
    }
    if (ec) throw EmptyInputError("cannot read data_dir: " + cfg_.data_dir);
    std::sort(all.begin(), all.end());
    for (const auto& p : all) {
      const std::string name = p.filename().string();
      const std::string suffix = "-matches.csv";
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        const std::string stem = name.substr(0, name.size() - suffix.size());
        const fs::path points = p.parent_path() / (stem + "-points.csv");
        if (fs::exists(points)) file_pairs.emplace_back(p, points);
      }
    }
  }
  if (file_pairs.empty()) {
    throw EmptyInputError("no <prefix>-matches.csv / <prefix>-points.csv pairs under " +
                          cfg_.data_dir);
  }

  std::vector<FileHash> inputs;
  for (const auto& [m, p] : file_pairs) {
    inputs.push_back(input_hash(m));
    inputs.push_back(input_hash(p));
  }
  if (fresh(dir, "ingest", inputs)) {
    log("[ingest] up to date");
    return;
  }
  log("[ingest] processing " + std::to_string(file_pairs.size()) + " file pair(s)");

  // Parse and segment file pairs in parallel; merge in file order so the
  // result never depends on scheduling.
  std::vector<FileResult> results(file_pairs.size());
  std::vector<std::string> worker_errors(file_pairs.size());
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= file_pairs.size()) break;
        try {
          results[i] = process_file_pair(file_pairs[i].first, file_pairs[i].second,
                                         cfg_.matches, cfg_.points);
        } catch (const std::exception& e) {
          worker_errors[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    const int jobs = std::max(1, options_.jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < worker_errors.size(); ++i) {
    if (!worker_errors[i].empty()) {
      throw EmptyInputError(file_pairs[i].first.string() + ": " + worker_errors[i]);
    }
  }

  std::map<std::string, PlayerAgg> players;
  std::vector<MatchStatsRow> matchrows;
  IngestCounters totals;
  json reject_samples = json::array();
  json seg_failures = json::array();
  for (const auto& result : results) {
    merge_players(players, result.players);
    matchrows.insert(matchrows.end(), result.matchrows.begin(), result.matchrows.end());
    merge_counters(totals, result.counters);
    for (const auto& sample : result.reject_samples) {
      if (reject_samples.size() < 100) reject_samples.push_back(sample);
    }
    for (const auto& sample : result.seg_failure_samples) {
      if (seg_failures.size() < 100) seg_failures.push_back(sample);
    }
  }

  // Eligibility: the match threshold applies to successfully processed
  // matches.
  std::set<std::string> eligible;
  for (const auto& [key, agg] : players) {
    if (agg.matches >= cfg_.min_matches) eligible.insert(key);
  }
  totals.filter.players_seen = static_cast<long long>(players.size());
  totals.filter.players_eligible = static_cast<long long>(eligible.size());

  std::vector<std::string> outputs;
  json zero_state_flags = json::array();

  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      std::ostringstream csv;
      csv << csv_stamp();
      std::vector<std::string> header = {"player", "role"};
      for (int i = 0; i < 18; ++i) {
        header.push_back("played_" + std::to_string(i));
        header.push_back("won_" + std::to_string(i));
      }
      header.insert(header.end(), {"matches", "games", "match_wins"});
      ingest::write_csv_row(csv, header);

      for (const auto& key : eligible) {
        const PlayerAgg& agg = players.at(key);
        if (agg.tour != tour) continue;
        const ingest::PlayerTallies& t =
            agg.by_role[role == Role::Service ? 0 : 1];
        std::vector<std::string> row = {agg.name, std::string(role_name(role))};
        json zero_states = json::array();
        for (int i = 0; i < 18; ++i) {
          const auto& cell = t.per_state[static_cast<std::size_t>(i)];
          row.push_back(std::to_string(cell.played));
          row.push_back(std::to_string(cell.won));
          if (cell.played == 0) zero_states.push_back(i);
        }
        row.push_back(std::to_string(agg.matches));
        row.push_back(std::to_string(t.games));
        row.push_back(std::to_string(agg.wins));
        ingest::write_csv_row(csv, row);
        if (!zero_states.empty()) {
          zero_state_flags.push_back({{"player", agg.name},
                                      {"tour", std::string(tour_name(tour))},
                                      {"role", std::string(role_name(role))},
                                      {"states", zero_states}});
        }
      }
      const std::string rel = "tallies/" + tallies_file_name(tour, role);
      write_file_atomic(out_ / rel, csv.str());
      outputs.push_back(rel);
    }
  }

  {
    std::stable_sort(matchrows.begin(), matchrows.end(),
                     [](const MatchStatsRow& a, const MatchStatsRow& b) {
                       const auto ka = outcome_key(a.tour, a.role, a.player) + "/" + a.match_id;
                       const auto kb = outcome_key(b.tour, b.role, b.player) + "/" + b.match_id;
                       return ka < kb;
                     });
    std::ostringstream csv;
    csv << csv_stamp();
    ingest::write_csv_row(
        csv, std::vector<std::string>{"player", "tour", "role", "match_id", "games", "games_won",
                                      "points"});
    for (const auto& r : matchrows) {
      const std::string key = std::string(tour_name(r.tour)) + "/" + r.player;
      if (eligible.count(key) == 0) continue;
      ingest::write_csv_row(csv, std::vector<std::string>{
                                     r.player, std::string(tour_name(r.tour)),
                                     std::string(role_name(r.role)), r.match_id,
                                     std::to_string(r.games), std::to_string(r.games_won),
                                     std::to_string(r.points)});
    }
    write_file_atomic(out_ / "tallies" / "matchstats.csv", csv.str());
    outputs.push_back("tallies/matchstats.csv");
  }

  {
    json report;
    report["config_hash"] = config_hash_;
    report["state_order"] = std::string(kStateOrderVersion);
    report["profile"] = cfg_.profile;
    report["files"] = static_cast<long long>(file_pairs.size());
    report["point_rows"] = totals.point_rows;
    report["rejected_rows"] = totals.rejects;
    report["reject_samples"] = reject_samples;
    report["filter"] = {{"total", totals.filter.total},
                        {"retired", totals.filter.retired},
                        {"walkover", totals.filter.walkover},
                        {"not_singles", totals.filter.not_singles},
                        {"no_points", totals.filter.no_points},
                        {"winner_unknown", totals.filter.winner_unknown},
                        {"retained", totals.filter.retained}};
    report["segmentation_failures"] = totals.seg_failures;
    report["segmentation_failure_samples"] = seg_failures;
    report["tiebreak_games"] = totals.tiebreak_games;
    report["incomplete_games"] = totals.incomplete_games;
    report["completed_games"] = totals.completed_games;
    report["games_total"] = totals.completed_games + totals.tiebreak_games +
                            totals.incomplete_games;
    report["points_tallied"] = totals.tallied_points;
    report["players_seen"] = totals.filter.players_seen;
    report["players_eligible"] = totals.filter.players_eligible;
    report["imputation_flags"] = zero_state_flags;
    if (cfg_.expect_corpus_magnitudes) {
      auto within = [](double actual, double expected) {
        return std::fabs(actual - expected) <= 0.02 * expected;
      };
      const double games_total = static_cast<double>(
          totals.completed_games + totals.tiebreak_games + totals.incomplete_games);
      json check;
      check["expected_matches"] = 8099;
      check["expected_games"] = 226795;
      check["actual_matches"] = totals.filter.retained;
      check["actual_games"] = games_total;
      const bool ok = within(static_cast<double>(totals.filter.retained), 8099.0) &&
                      within(games_total, 226795.0);
      check["within_2pct"] = ok;
      report["magnitude_check"] = check;
      if (!ok) log("[ingest] WARNING: corpus magnitudes deviate >2% from expected counts");
    }
    write_file_atomic(out_ / "tallies" / "ingest_report.json", report.dump(2) + "\n");
    outputs.push_back("tallies/ingest_report.json");
  }

  finalize(dir, "ingest", std::move(inputs), std::move(outputs));
  log("[ingest] wrote tallies for " + std::to_string(eligible.size()) + " player(s)");
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

void Pipeline::run_fit() {
  require_stage("ingest", "tallies");
  const fs::path dir = out_ / "fits";

  std::vector<FileHash> inputs;
  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      inputs.push_back(input_hash(out_ / "tallies" / tallies_file_name(tour, role)));
    }
  }
  const fs::path matchstats_file = out_ / "tallies" / "matchstats.csv";
  inputs.push_back(input_hash(matchstats_file));
  if (fresh(dir, "fit", inputs)) {
    log("[fit] up to date");
    return;
  }

  const auto tallies = read_tallies_dir(out_ / "tallies");
  const auto matchstats = read_matchstats(matchstats_file);

  std::map<std::string, std::vector<fit::MatchGameStats>> stats_by_key;
  for (const auto& r : matchstats) {
    stats_by_key[outcome_key(r.tour, r.role, r.player)].push_back(
        {r.games, r.games_won, r.points});
  }

  std::ostringstream strategies_csv;
  strategies_csv << csv_stamp();
  {
    std::vector<std::string> header = {"player", "tour", "role", "average_pwp", "constant_p"};
    for (int i = 0; i < 18; ++i) header.push_back("p_" + std::to_string(i));
    header.push_back("imputed_states");
    ingest::write_csv_row(strategies_csv, header);
  }
  std::ostringstream cmp_csv;
  cmp_csv << csv_stamp();
  ingest::write_csv_row(cmp_csv, std::vector<std::string>{"player", "tour", "role", "n_matches",
                                                          "target", "model", "aic", "bic", "r2",
                                                          "adjusted_r2", "rss"});

  json skipped = json::array();
  long long compared = 0;

  for (const auto& t : tallies) {
    fit::EstimatedStrategies est;
    try {
      est = fit::estimate_strategies(t);
    } catch (const EstimationError& e) {
      skipped.push_back({{"player", t.player},
                         {"tour", std::string(tour_name(t.tour))},
                         {"role", std::string(role_name(t.role))},
                         {"reason", e.what()}});
      continue;
    }
    {
      std::vector<std::string> row = {t.player, std::string(tour_name(t.tour)),
                                      std::string(role_name(t.role)), fmt(t.average_pwp()),
                                      fmt(est.constant[0])};
      std::string imputed;
      for (int i = 0; i < 18; ++i) {
        row.push_back(fmt(est.score_dependent[i]));
        if (est.imputed[static_cast<std::size_t>(i)]) {
          if (!imputed.empty()) imputed += ";";
          imputed += std::to_string(i);
        }
      }
      row.push_back(imputed);
      ingest::write_csv_row(strategies_csv, row);
    }

    const auto it = stats_by_key.find(outcome_key(t.tour, t.role, t.player));
    if (it == stats_by_key.end()) continue;
    const auto obs = fit::per_match_observations(it->second);
    if (obs.size() < 3) {
      skipped.push_back({{"player", t.player},
                         {"tour", std::string(tour_name(t.tour))},
                         {"role", std::string(role_name(t.role))},
                         {"reason", "fewer than 3 matches with games"}});
      continue;
    }
    fit::ModelComparison cmp;
    try {
      cmp = fit::compare_models(est, obs);
    } catch (const DegenerateFitError& e) {
      skipped.push_back({{"player", t.player},
                         {"tour", std::string(tour_name(t.tour))},
                         {"role", std::string(role_name(t.role))},
                         {"reason", e.what()}});
      continue;
    }
    ++compared;
    auto emit = [&](const char* target, const char* model, const fit::CriteriaResult& r) {
      ingest::write_csv_row(
          cmp_csv, std::vector<std::string>{
                       t.player, std::string(tour_name(t.tour)), std::string(role_name(t.role)),
                       std::to_string(cmp.n_matches), target, model, fmt(r.aic), fmt(r.bic),
                       fmt(r.r2), r.adjusted_r2 ? fmt(*r.adjusted_r2) : "", fmt(r.rss)});
    };
    emit("game_win_probability", "constant", cmp.win.constant);
    emit("game_win_probability", "score_dependent", cmp.win.score_dependent);
    emit("expected_points", "constant", cmp.points.constant);
    emit("expected_points", "score_dependent", cmp.points.score_dependent);
  }

  std::vector<std::string> outputs;
  write_file_atomic(out_ / "fits" / "strategies.csv", strategies_csv.str());
  outputs.push_back("fits/strategies.csv");
  write_file_atomic(out_ / "fits" / "model_comparison.csv", cmp_csv.str());
  outputs.push_back("fits/model_comparison.csv");
  {
    json report;
    report["config_hash"] = config_hash_;
    report["profile"] = cfg_.profile;
    report["players_compared"] = compared;
    report["skipped"] = skipped;
    write_file_atomic(out_ / "fits" / "fit_report.json", report.dump(2) + "\n");
    outputs.push_back("fits/fit_report.json");
  }
  finalize(dir, "fit", std::move(inputs), std::move(outputs));
  log("[fit] compared models for " + std::to_string(compared) + " player-role(s)");
}

// ---------------------------------------------------------------------------
// frontier
// ---------------------------------------------------------------------------

void Pipeline::run_frontier() {
  require_stage("ingest", "tallies");
  const fs::path dir = out_ / "frontiers";

  std::vector<FileHash> inputs;
  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      inputs.push_back(input_hash(out_ / "tallies" / tallies_file_name(tour, role)));
    }
  }
  inputs.push_back(config_input("master_seed", std::to_string(cfg_.master_seed)));
  inputs.push_back(config_input("epsilon_list", epsilon_list_string()));
  inputs.push_back(config_input("players", cfg_.players_filter));
  if (fresh(dir, "frontier", inputs)) {
    log("[frontier] up to date");
    return;
  }

  const auto tallies = read_tallies_dir(out_ / "tallies");

  struct Task {
    const ingest::PlayerTallies* tallies = nullptr;
    double epsilon = 0.0;
    std::string rel_path;
    // results
    bool skipped = false;
    std::string skip_reason;
    opt::Frontier frontier;
    double target = 0.0;
    std::vector<std::uint64_t> seeds;
  };
  std::vector<Task> tasks;
  for (double eps : cfg_.epsilon_list) {
    for (const auto& t : tallies) {
      if (!cfg_.player_selected(t.player)) continue;
      if (t.points_played() <= 0) continue;
      Task task;
      task.tallies = &t;
      task.epsilon = eps;
      task.rel_path = "frontiers/" + category_key(t.tour, t.role) + "/" +
                      sanitize_name(t.player) + "__eps" + epsilon_tag(eps) + ".json";
      tasks.push_back(std::move(task));
    }
  }

  const int jobs = std::max(1, options_.jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      Task& task = tasks[i];
      const auto& t = *task.tallies;
      CategoryConfig cat = cfg_.category(t.tour, t.role);
      cat.epsilon = task.epsilon;
      task.target = t.average_pwp();
      if (task.target < cat.search_lo || task.target > cat.search_hi) {
        task.skipped = true;
        task.skip_reason = "average_pwp outside the category search box";
        continue;
      }
      const std::string stream_name = category_key(t.tour, t.role) + ":" + t.player;
      for (int s = 0; s < cat.n_seeds; ++s) {
        task.seeds.push_back(derive_seed(cfg_.master_seed, stream_name,
                                         static_cast<std::uint64_t>(s)));
      }
      task.frontier = opt::seeded_union(task.target, cat, task.seeds);
    }
  };
  {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> outputs;
  std::ostringstream points_csv;
  points_csv << csv_stamp();
  ingest::write_csv_row(points_csv,
                        std::vector<std::string>{"player", "tour", "role", "epsilon", "win_prob",
                                                 "expected_points"});
  json skipped = json::array();
  for (const auto& task : tasks) {
    const auto& t = *task.tallies;
    if (task.skipped) {
      skipped.push_back({{"player", t.player},
                         {"tour", std::string(tour_name(t.tour))},
                         {"role", std::string(role_name(t.role))},
                         {"epsilon", task.epsilon},
                         {"reason", task.skip_reason}});
      continue;
    }
    const CategoryConfig cat = cfg_.category(t.tour, t.role);
    json doc;
    doc["player"] = t.player;
    doc["tour"] = std::string(tour_name(t.tour));
    doc["role"] = std::string(role_name(t.role));
    doc["profile"] = cfg_.profile;
    doc["state_order"] = std::string(kStateOrderVersion);
    doc["config_hash"] = config_hash_;
    doc["epsilon"] = task.epsilon;
    doc["target_avg"] = task.target;
    doc["config"] = {{"search_lo", cat.search_lo},
                     {"search_hi", cat.search_hi},
                     {"population", cat.population},
                     {"max_generations", cat.max_generations},
                     {"function_tolerance", cat.function_tolerance},
                     {"crossover_rate", cat.crossover_rate},
                     {"pareto_fraction", cat.pareto_fraction},
                     {"n_seeds", cat.n_seeds},
                     {"weighted_constraint", cfg_.weighted_constraint}};
    doc["seeds"] = task.seeds;
    json points = json::array();
    for (const auto& p : task.frontier.points) {
      json strategy = json::array();
      for (int i = 0; i < 18; ++i) strategy.push_back(p.strategy[i]);
      points.push_back({{"win", p.outcome.win},
                        {"expected_points", p.outcome.points},
                        {"seed", p.seed},
                        {"strategy", strategy}});
      ingest::write_csv_row(points_csv,
                            std::vector<std::string>{t.player, std::string(tour_name(t.tour)),
                                                     std::string(role_name(t.role)),
                                                     fmt(task.epsilon), fmt(p.outcome.win),
                                                     fmt(p.outcome.points)});
    }
    doc["points"] = points;
    write_file_atomic(out_ / task.rel_path, doc.dump(2) + "\n");
    outputs.push_back(task.rel_path);
  }
  write_file_atomic(out_ / "frontiers" / "frontier_points.csv", points_csv.str());
  outputs.push_back("frontiers/frontier_points.csv");
  {
    json report;
    report["config_hash"] = config_hash_;
    report["profile"] = cfg_.profile;
    report["tasks"] = tasks.size();
    report["skipped"] = skipped;
    write_file_atomic(out_ / "frontiers" / "frontier_report.json", report.dump(2) + "\n");
    outputs.push_back("frontiers/frontier_report.json");
  }
  finalize(dir, "frontier", std::move(inputs), std::move(outputs));
  log("[frontier] computed " + std::to_string(tasks.size()) + " frontier(s) (" +
      std::string(kernels::impl_name(kernels::active_impl())) + " kernel)");
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

void Pipeline::run_metrics() {
  require_stage("ingest", "tallies");
  require_stage("fit", "fits");
  const StageManifest frontier_manifest = require_stage("frontier", "frontiers");
  const fs::path dir = out_ / "metrics";

  std::vector<FileHash> inputs;
  inputs.push_back(input_hash(out_ / "frontiers" / "manifest.json"));
  inputs.push_back(input_hash(out_ / "fits" / "strategies.csv"));
  inputs.push_back(input_hash(out_ / "tallies" / "matchstats.csv"));
  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      inputs.push_back(input_hash(out_ / "tallies" / tallies_file_name(tour, role)));
    }
  }
  inputs.push_back(config_input("distance_mode", cfg_.distance_mode));
  if (fresh(dir, "metrics", inputs)) {
    log("[metrics] up to date");
    return;
  }

  const auto tallies = read_tallies_dir(out_ / "tallies");
  const auto matchstats = read_matchstats(out_ / "tallies" / "matchstats.csv");
  const auto strategies = read_strategies(out_ / "fits" / "strategies.csv");
  const auto observed = observed_outcomes(matchstats);

  std::map<std::string, const ingest::PlayerTallies*> tallies_by_key;
  for (const auto& t : tallies) tallies_by_key[outcome_key(t.tour, t.role, t.player)] = &t;
  std::map<std::string, const StrategyRow*> strategies_by_key;
  for (const auto& s : strategies) strategies_by_key[outcome_key(s.tour, s.role, s.player)] = &s;

  std::ostringstream metrics_csv;
  metrics_csv << csv_stamp();
  ingest::write_csv_row(
      metrics_csv,
      std::vector<std::string>{"player", "tour", "role", "epsilon", "tier", "matches",
                               "match_win_pct", "average_pwp", "game_win_prob", "expected_points",
                               "efficiency", "efficiency_distance", "strategy_fit",
                               "strategy_fit_distance", "optimal_contrast", "flags"});
  std::ostringstream optima_csv;
  optima_csv << csv_stamp();
  {
    std::vector<std::string> header = {"player", "tour", "role", "epsilon"};
    for (int i = 0; i < 18; ++i) header.push_back("o_" + std::to_string(i));
    ingest::write_csv_row(optima_csv, header);
  }

  struct PatternAcc {
    std::vector<StrategyVector> optima;
  };
  std::map<std::string, PatternAcc> patterns;  // key: tour/role/eps-tag
  json skipped = json::array();
  long long rows_written = 0;

  // Frontier docs, in the deterministic order recorded by the stage manifest.
  for (const auto& outfile : frontier_manifest.outputs) {
    if (outfile.path.find("__eps") == std::string::npos) continue;
    json doc;
    const opt::Frontier frontier = read_frontier_doc(out_ / outfile.path, &doc);
    const std::string player = doc.at("player").get<std::string>();
    const Tour tour = tour_of(doc.at("tour").get<std::string>());
    const Role role = role_of(doc.at("role").get<std::string>());
    const double eps = doc.at("epsilon").get<double>();
    const std::string key = outcome_key(tour, role, player);

    auto note_skip = [&](const std::string& reason) {
      skipped.push_back({{"player", player},
                         {"tour", std::string(tour_name(tour))},
                         {"role", std::string(role_name(role))},
                         {"epsilon", eps},
                         {"reason", reason}});
    };
    if (frontier.empty()) {
      note_skip("empty frontier (no feasible point)");
      continue;
    }
    const auto obs_it = observed.find(key);
    if (obs_it == observed.end()) {
      note_skip("no observed games");
      continue;
    }
    const auto tal_it = tallies_by_key.find(key);
    const auto str_it = strategies_by_key.find(key);
    if (tal_it == tallies_by_key.end() || str_it == strategies_by_key.end()) {
      note_skip("missing tallies or strategies row");
      continue;
    }

    const opt::OutcomePair obs{obs_it->second.win, obs_it->second.points};
    const auto eff = metrics::efficiency_score(obs, frontier, cfg_.metric_distance_mode());
    const int closest = metrics::closest_optimal_index(obs, frontier);
    const StrategyVector& optimal =
        frontier.points[static_cast<std::size_t>(closest)].strategy;
    const CategoryConfig cat = cfg_.category(tour, role);
    const auto fit_result =
        metrics::strategy_fit(str_it->second->score_dependent, optimal, cat.delta_p());
    const double contrast = metrics::optimal_contrast(optimal);
    const ingest::Tier tier =
        ingest::assign_tier(tal_it->second->match_win_pct(), cfg_.tier_low, cfg_.tier_high);

    std::string flags;
    auto add_flag = [&](const char* f) {
      if (!flags.empty()) flags += ";";
      flags += f;
    };
    if (eff.degenerate_frontier) add_flag("degenerate_frontier");
    if (fit_result.clamped) add_flag("clamped");
    if (!str_it->second->imputed.empty()) add_flag("imputed");

    ingest::write_csv_row(
        metrics_csv,
        std::vector<std::string>{
            player, std::string(tour_name(tour)), std::string(role_name(role)), fmt(eps),
            std::string(ingest::tier_name(tier)), std::to_string(tal_it->second->matches),
            fmt(tal_it->second->match_win_pct()), fmt(tal_it->second->average_pwp()),
            fmt(obs.win), fmt(obs.points), fmt(eff.efficiency), fmt(eff.distance),
            fmt(fit_result.fit), fmt(fit_result.distance), fmt(contrast), flags});
    ++rows_written;

    {
      std::vector<std::string> row = {player, std::string(tour_name(tour)),
                                      std::string(role_name(role)), fmt(eps)};
      for (int i = 0; i < 18; ++i) row.push_back(fmt(optimal[i]));
      ingest::write_csv_row(optima_csv, row);
    }
    patterns[category_key(tour, role) + "/" + epsilon_tag(eps)].optima.push_back(optimal);
  }

  std::ostringstream pattern_csv;
  pattern_csv << csv_stamp();
  ingest::write_csv_row(pattern_csv,
                        std::vector<std::string>{"tour", "role", "epsilon", "state_index",
                                                 "state_label", "mean_optimal", "pattern_mean",
                                                 "deviation"});
  for (const auto& [key, acc] : patterns) {
    const auto slash = key.find('/');
    const std::string cat_key = key.substr(0, slash);
    const std::string eps_tag = key.substr(slash + 1);
    const auto underscore = cat_key.find('_');
    const std::string tour_s = cat_key.substr(0, underscore);
    const std::string role_s = cat_key.substr(underscore + 1);
    const StrategyVector mean = metrics::category_pattern(acc.optima);
    const double pattern_mean = mean.mean();
    for (int i = 0; i < 18; ++i) {
      ingest::write_csv_row(
          pattern_csv,
          std::vector<std::string>{
              tour_s, role_s, eps_tag, std::to_string(i),
              std::string(ScoreState::from_index(i).label()), fmt(mean[i]), fmt(pattern_mean),
              fmt(mean[i] - pattern_mean)});
    }
  }

  std::vector<std::string> outputs;
  write_file_atomic(out_ / "metrics" / "metrics.csv", metrics_csv.str());
  outputs.push_back("metrics/metrics.csv");
  write_file_atomic(out_ / "metrics" / "optimal_strategies.csv", optima_csv.str());
  outputs.push_back("metrics/optimal_strategies.csv");
  write_file_atomic(out_ / "metrics" / "category_patterns.csv", pattern_csv.str());
  outputs.push_back("metrics/category_patterns.csv");
  {
    json report;
    report["config_hash"] = config_hash_;
    report["profile"] = cfg_.profile;
    report["rows"] = rows_written;
    report["skipped"] = skipped;
    report["distance_mode"] = cfg_.distance_mode;
    write_file_atomic(out_ / "metrics" / "metrics_report.json", report.dump(2) + "\n");
    outputs.push_back("metrics/metrics_report.json");
  }
  finalize(dir, "metrics", std::move(inputs), std::move(outputs));
  log("[metrics] wrote " + std::to_string(rows_written) + " metric row(s)");
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

void Pipeline::run_stats() {
  require_stage("metrics", "metrics");
  const fs::path dir = out_ / "stats";

  std::vector<FileHash> inputs;
  inputs.push_back(input_hash(out_ / "metrics" / "metrics.csv"));
  inputs.push_back(config_input("master_seed", std::to_string(cfg_.master_seed)));
  inputs.push_back(config_input("lilliefors_replicates",
                                std::to_string(cfg_.lilliefors_replicates)));
  inputs.push_back(config_input("bootstrap_iterations",
                                std::to_string(cfg_.bootstrap_iterations)));
  inputs.push_back(config_input("primary_epsilon", fmt(cfg_.epsilon_list.front())));
  if (fresh(dir, "stats", inputs)) {
    log("[stats] up to date");
    return;
  }

  const auto all_rows = read_metrics(out_ / "metrics" / "metrics.csv");
  const double primary_eps = cfg_.epsilon_list.front();
  std::vector<MetricsRow> rows;
  for (const auto& r : all_rows) {
    if (std::fabs(r.epsilon - primary_eps) < 1e-12) rows.push_back(r);
  }

  json comparisons = json::array();
  const std::array<ingest::Tier, 3> tiers = {ingest::Tier::Low, ingest::Tier::Mid,
                                             ingest::Tier::High};

  for (Tour tour : {Tour::Men, Tour::Women}) {
    for (Role role : {Role::Service, Role::Return}) {
      for (const std::string metric : {"efficiency", "strategy_fit"}) {
        std::array<std::vector<double>, 3> groups;
        for (const auto& r : rows) {
          if (r.tour != tour || r.role != role) continue;
          const double value = metric == "efficiency" ? r.efficiency : r.strategy_fit;
          groups[static_cast<std::size_t>(r.tier)].push_back(value);
        }

        json entry;
        entry["tour"] = std::string(tour_name(tour));
        entry["role"] = std::string(role_name(role));
        entry["metric"] = metric;
        entry["epsilon"] = primary_eps;

        // Normality pretest selects the family: any violation (or any group
        // too small to test) sends the whole metric to rank tests.
        bool use_ranks = false;
        json normality = json::array();
        for (std::size_t g = 0; g < 3; ++g) {
          json n_entry;
          n_entry["tier"] = std::string(ingest::tier_name(tiers[g]));
          n_entry["n"] = groups[g].size();
          if (groups[g].size() < 4) {
            n_entry["status"] = "too_small";
            use_ranks = true;
          } else {
            try {
              const auto lt = stats::lilliefors_test(
                  groups[g], cfg_.lilliefors_replicates,
                  derive_seed(cfg_.master_seed,
                              "stats:lilliefors:" + category_key(tour, role) + ":" + metric,
                              g));
              n_entry["statistic"] = lt.statistic;
              n_entry["p"] = lt.p_value;
              n_entry["status"] = "ok";
              if (lt.p_value < 0.05) use_ranks = true;
            } catch (const DegenerateSampleError&) {
              n_entry["status"] = "degenerate";
              use_ranks = true;
            }
          }
          normality.push_back(n_entry);
        }
        entry["normality"] = normality;
        entry["family"] = use_ranks ? "mann_whitney" : "tukey_kramer";

        const std::array<std::pair<std::size_t, std::size_t>, 3> pair_idx = {
            {{0, 1}, {0, 2}, {1, 2}}};
        json pairs = json::array();

        if (use_ranks) {
          std::vector<double> raw_p;
          for (const auto& [a, b] : pair_idx) {
            json p_entry;
            p_entry["a"] = std::string(ingest::tier_name(tiers[a]));
            p_entry["b"] = std::string(ingest::tier_name(tiers[b]));
            if (groups[a].size() < 2 || groups[b].size() < 2) {
              p_entry["status"] = "insufficient_groups";
              pairs.push_back(p_entry);
              continue;
            }
            const auto mw = stats::mann_whitney_u(groups[a], groups[b]);
            const double delta = stats::cliffs_delta(groups[a], groups[b]);
            const auto ci = stats::bootstrap_ci(
                stats::EffectKind::CliffsDelta, groups[a], groups[b], cfg_.bootstrap_iterations,
                derive_seed(cfg_.master_seed,
                            "stats:boot:" + category_key(tour, role) + ":" + metric,
                            a * 3 + b));
            p_entry["status"] = "ok";
            p_entry["method"] = mw.exact ? "mann_whitney_exact" : "mann_whitney_normal";
            p_entry["statistic"] = mw.u;
            p_entry["p"] = mw.p_two_sided;
            p_entry["effect"] = "cliffs_delta";
            p_entry["effect_size"] = delta;
            p_entry["ci_lo"] = ci.lo;
            p_entry["ci_hi"] = ci.hi;
            p_entry["large_effect"] = std::fabs(delta) >= stats::kLargeCliffsDelta;
            raw_p.push_back(mw.p_two_sided);
            pairs.push_back(p_entry);
          }
          // Bonferroni over the comparisons actually performed.
          const auto adjusted = stats::bonferroni(raw_p);
          std::size_t vi = 0;
          for (auto& p_entry : pairs) {
            if (p_entry.value("status", "") != "ok") continue;
            p_entry["p_adjusted"] = adjusted[vi];
            ++vi;
          }
        } else {
          std::vector<std::vector<double>> tk_groups = {groups[0], groups[1], groups[2]};
          std::vector<stats::TukeyComparison> table;
          bool tk_ok = true;
          try {
            table = stats::tukey_kramer(tk_groups);
          } catch (const std::exception&) {
            tk_ok = false;
          }
          for (std::size_t k = 0; k < pair_idx.size(); ++k) {
            const auto [a, b] = pair_idx[k];
            json p_entry;
            p_entry["a"] = std::string(ingest::tier_name(tiers[a]));
            p_entry["b"] = std::string(ingest::tier_name(tiers[b]));
            if (!tk_ok || groups[a].size() < 2 || groups[b].size() < 2) {
              p_entry["status"] = "insufficient_groups";
              pairs.push_back(p_entry);
              continue;
            }
            const stats::TukeyComparison* cmp = nullptr;
            for (const auto& c : table) {
              if (c.group_a == static_cast<int>(a) && c.group_b == static_cast<int>(b)) cmp = &c;
            }
            if (cmp == nullptr) {
              p_entry["status"] = "insufficient_groups";
              pairs.push_back(p_entry);
              continue;
            }
            double d = 0.0;
            bool d_ok = true;
            try {
              d = stats::cohens_d(groups[a], groups[b]);
            } catch (const DegenerateSampleError&) {
              d_ok = false;
            }
            p_entry["status"] = "ok";
            p_entry["method"] = "tukey_kramer";
            p_entry["statistic"] = cmp->q;
            p_entry["p"] = cmp->p;
            // The studentized-range p is already family-adjusted.
            p_entry["p_adjusted"] = cmp->p;
            if (d_ok) {
              const auto ci = stats::bootstrap_ci(
                  stats::EffectKind::CohensD, groups[a], groups[b], cfg_.bootstrap_iterations,
                  derive_seed(cfg_.master_seed,
                              "stats:boot:" + category_key(tour, role) + ":" + metric,
                              a * 3 + b));
              p_entry["effect"] = "cohens_d";
              p_entry["effect_size"] = d;
              p_entry["ci_lo"] = ci.lo;
              p_entry["ci_hi"] = ci.hi;
              p_entry["large_effect"] = std::fabs(d) >= stats::kLargeCohensD;
            } else {
              p_entry["effect"] = "cohens_d";
              p_entry["effect_status"] = "degenerate";
            }
            pairs.push_back(p_entry);
          }
        }
        entry["pairs"] = pairs;
        comparisons.push_back(entry);
      }
    }
  }

  // Contrast-versus-ability regressions: pooled across every player-role row,
  // then per category.
  json regression;
  {
    auto regress = [&](const std::vector<const MetricsRow*>& sel) -> json {
      json j;
      j["n"] = sel.size();
      if (sel.size() < 3) {
        j["status"] = "insufficient_data";
        return j;
      }
      std::vector<double> x, y;
      for (const auto* r : sel) {
        x.push_back(r->average_pwp);
        y.push_back(r->optimal_contrast);
      }
      try {
        const auto reg = stats::pearson_and_regression(x, y);
        j["status"] = "ok";
        j["r"] = reg.r;
        j["p"] = reg.p_value;
        j["slope"] = reg.slope;
        j["intercept"] = reg.intercept;
      } catch (const DegenerateSampleError&) {
        j["status"] = "degenerate";
      }
      return j;
    };
    std::vector<const MetricsRow*> pooled;
    for (const auto& r : rows) pooled.push_back(&r);
    regression["pooled"] = regress(pooled);
    json per_category = json::array();
    for (Tour tour : {Tour::Men, Tour::Women}) {
      for (Role role : {Role::Service, Role::Return}) {
        std::vector<const MetricsRow*> sel;
        for (const auto& r : rows) {
          if (r.tour == tour && r.role == role) sel.push_back(&r);
        }
        json j = regress(sel);
        j["tour"] = std::string(tour_name(tour));
        j["role"] = std::string(role_name(role));
        per_category.push_back(j);
      }
    }
    regression["per_category"] = per_category;
    regression["epsilon"] = primary_eps;
  }

  std::vector<std::string> outputs;
  {
    json doc;
    doc["config_hash"] = config_hash_;
    doc["profile"] = cfg_.profile;
    doc["epsilon"] = primary_eps;
    doc["comparisons"] = comparisons;
    write_file_atomic(out_ / "stats" / "comparisons.json", doc.dump(2) + "\n");
    outputs.push_back("stats/comparisons.json");
  }
  {
    regression["config_hash"] = config_hash_;
    regression["profile"] = cfg_.profile;
    write_file_atomic(out_ / "stats" / "regression.json", regression.dump(2) + "\n");
    outputs.push_back("stats/regression.json");
  }
  finalize(dir, "stats", std::move(inputs), std::move(outputs));
  log("[stats] wrote tier comparisons and regressions");
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

void Pipeline::run_report() {
  require_stage("fit", "fits");
  require_stage("frontier", "frontiers");
  require_stage("metrics", "metrics");
  require_stage("stats", "stats");
  const fs::path dir = out_ / "report";

  const std::vector<fs::path> input_files = {
      out_ / "fits" / "model_comparison.csv", out_ / "metrics" / "metrics.csv",
      out_ / "metrics" / "category_patterns.csv", out_ / "frontiers" / "frontier_points.csv",
      out_ / "stats" / "comparisons.json", out_ / "stats" / "regression.json"};
  std::vector<FileHash> inputs;
  for (const auto& f : input_files) {
    if (!fs::exists(f)) throw StageDependencyError("missing upstream artifact: " + f.string());
    inputs.push_back(input_hash(f));
  }
  if (fresh(dir, "report", inputs)) {
    log("[report] up to date");
    return;
  }

  std::vector<std::string> outputs;

  // (a) Model comparison averaged across players per category and target.
  {
    std::ifstream in(out_ / "fits" / "model_comparison.csv");
    const auto table = ingest::read_csv(in);
    const std::string f = "model_comparison.csv";
    const int c_tour = require_col(table, "tour", f);
    const int c_role = require_col(table, "role", f);
    const int c_target = require_col(table, "target", f);
    const int c_model = require_col(table, "model", f);
    const int c_aic = require_col(table, "aic", f);
    const int c_bic = require_col(table, "bic", f);
    const int c_adj = require_col(table, "adjusted_r2", f);

    struct Acc {
      double aic = 0.0, bic = 0.0, adj = 0.0;
      long long n = 0, n_adj = 0;
    };
    std::map<std::string, Acc> acc;  // key tour/role/target/model
    for (const auto& row : table.rows) {
      const std::string key = row[static_cast<std::size_t>(c_tour)] + "/" +
                              row[static_cast<std::size_t>(c_role)] + "/" +
                              row[static_cast<std::size_t>(c_target)] + "/" +
                              row[static_cast<std::size_t>(c_model)];
      auto& a = acc[key];
      a.aic += parse_double_field(row[static_cast<std::size_t>(c_aic)]);
      a.bic += parse_double_field(row[static_cast<std::size_t>(c_bic)]);
      ++a.n;
      const std::string& adj = row[static_cast<std::size_t>(c_adj)];
      if (!adj.empty()) {
        a.adj += parse_double_field(adj);
        ++a.n_adj;
      }
    }

    std::ostringstream csv;
    csv << csv_stamp();
    ingest::write_csv_row(csv, std::vector<std::string>{"target", "category", "metric",
                                                        "constant", "score_dependent",
                                                        "difference"});
    for (const std::string target : {"game_win_probability", "expected_points"}) {
      for (Tour tour : {Tour::Men, Tour::Women}) {
        for (Role role : {Role::Service, Role::Return}) {
          const std::string base = std::string(tour_name(tour)) + "/" +
                                   std::string(role_name(role)) + "/" + target + "/";
          const auto c_it = acc.find(base + "constant");
          const auto s_it = acc.find(base + "score_dependent");
          if (c_it == acc.end() || s_it == acc.end() || c_it->second.n == 0 ||
              s_it->second.n == 0) {
            continue;
          }
          const auto& c = c_it->second;
          const auto& s = s_it->second;
          const std::string category =
              std::string(tour_name(tour)) + "'s " + std::string(role_name(role));
          const double c_aic = c.aic / static_cast<double>(c.n);
          const double s_aic = s.aic / static_cast<double>(s.n);
          const double c_bic = c.bic / static_cast<double>(c.n);
          const double s_bic = s.bic / static_cast<double>(s.n);
          ingest::write_csv_row(csv, std::vector<std::string>{target, category, "AIC", fmt(c_aic),
                                                              fmt(s_aic), fmt(s_aic - c_aic)});
          ingest::write_csv_row(csv, std::vector<std::string>{target, category, "BIC", fmt(c_bic),
                                                              fmt(s_bic), fmt(s_bic - c_bic)});
          ingest::write_csv_row(
              csv, std::vector<std::string>{
                       target, category, "adjusted_R2",
                       c.n_adj > 0 ? fmt(c.adj / static_cast<double>(c.n_adj)) : "",
                       s.n_adj > 0 ? fmt(s.adj / static_cast<double>(s.n_adj)) : "", ""});
        }
      }
    }
    write_file_atomic(out_ / "report" / "model_comparison.csv", csv.str());
    outputs.push_back("report/model_comparison.csv");
  }

  // (b) Per-player metrics, re-emitted verbatim.
  {
    std::ifstream in(out_ / "metrics" / "metrics.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    write_file_atomic(out_ / "report" / "player_metrics.csv", ss.str());
    outputs.push_back("report/player_metrics.csv");
  }

  // (c) Tier comparison tables.
  {
    std::ifstream in(out_ / "stats" / "comparisons.json", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    write_file_atomic(out_ / "report" / "tier_comparisons.json", ss.str());
    outputs.push_back("report/tier_comparisons.json");
  }

  // (d) Plot data: frontier curves, allocation patterns, contrast scatter.
  {
    std::ifstream in(out_ / "frontiers" / "frontier_points.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    write_file_atomic(out_ / "report" / "frontier_curves.csv", ss.str());
    outputs.push_back("report/frontier_curves.csv");
  }
  {
    std::ifstream in(out_ / "metrics" / "category_patterns.csv", std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    write_file_atomic(out_ / "report" / "allocation_patterns.csv", ss.str());
    outputs.push_back("report/allocation_patterns.csv");
  }
  {
    const auto all_rows = read_metrics(out_ / "metrics" / "metrics.csv");
    const double primary_eps = cfg_.epsilon_list.front();
    std::vector<MetricsRow> rows;
    for (const auto& r : all_rows) {
      if (std::fabs(r.epsilon - primary_eps) < 1e-12) rows.push_back(r);
    }
    std::ostringstream csv;
    csv << csv_stamp();
    ingest::write_csv_row(csv, std::vector<std::string>{"player", "tour", "role", "average_pwp",
                                                        "optimal_contrast", "fit", "band_lo",
                                                        "band_hi"});
    if (rows.size() >= 3) {
      std::vector<double> x, y;
      for (const auto& r : rows) {
        x.push_back(r.average_pwp);
        y.push_back(r.optimal_contrast);
      }
      try {
        const auto reg = stats::pearson_and_regression(x, y);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          ingest::write_csv_row(
              csv, std::vector<std::string>{rows[i].player, std::string(tour_name(rows[i].tour)),
                                            std::string(role_name(rows[i].role)), fmt(x[i]),
                                            fmt(y[i]), fmt(reg.band[i].fit), fmt(reg.band[i].lo),
                                            fmt(reg.band[i].hi)});
        }
      } catch (const DegenerateSampleError&) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
          ingest::write_csv_row(
              csv, std::vector<std::string>{rows[i].player, std::string(tour_name(rows[i].tour)),
                                            std::string(role_name(rows[i].role)), fmt(x[i]),
                                            fmt(y[i]), "", "", ""});
        }
      }
    }
    write_file_atomic(out_ / "report" / "contrast_scatter.csv", csv.str());
    outputs.push_back("report/contrast_scatter.csv");
  }

  finalize(dir, "report", std::move(inputs), std::move(outputs));
  log("[report] bundle complete under " + (out_ / "report").string());
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

std::string run_simulate(const SimulateOptions& options) {
  StrategyVector strategy = StrategyVector::constant(options.constant_p);
  if (!options.strategy_file.empty()) {
    std::ifstream in(options.strategy_file);
    if (!in) throw EmptyInputError("cannot open strategy file: " + options.strategy_file);
    json doc;
    in >> doc;
    if (!doc.is_array() || doc.size() != 18) {
      throw EmptyInputError("strategy file must hold a JSON array of 18 probabilities");
    }
    for (int i = 0; i < 18; ++i) strategy[i] = doc.at(static_cast<std::size_t>(i)).get<double>();
  }

  const GameOutcome exact = solve_chain(strategy);
  const auto sim = simulate_games(strategy, options.games, options.seed);

  std::ostringstream os;
  os << "games simulated: " << sim.games << "  (seed " << options.seed << ")\n";
  os << "                 chain        monte carlo   std.err   z\n";
  const double z_win = (sim.win_fraction() - exact.win_probability) /
                       std::max(sim.win_fraction_se(), 1e-300);
  const double z_pts =
      (sim.mean_points() - exact.expected_points) / std::max(sim.mean_points_se(), 1e-300);
  char line[160];
  std::snprintf(line, sizeof(line), "win probability  %-12.6f %-13.6f %-9.6f %+.2f\n",
                exact.win_probability, sim.win_fraction(), sim.win_fraction_se(), z_win);
  os << line;
  std::snprintf(line, sizeof(line), "points per game  %-12.6f %-13.6f %-9.6f %+.2f\n",
                exact.expected_points, sim.mean_points(), sim.mean_points_se(), z_pts);
  os << line;
  os << "induced average pwp: " << format_double(induced_average_pwp(strategy, exact)) << "\n";
  return os.str();
}

}  // namespace tennis::pipeline
