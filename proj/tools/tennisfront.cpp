// tennisfront: batch pipeline for game-level efficiency analysis of Grand
// Slam point-by-point data. Stages: ingest -> fit -> frontier -> metrics ->
// stats -> report, each cached behind a manifest; `simulate` runs Monte Carlo
// sanity checks against the exact chain solver.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tennis/errors.hpp"
#include "tennis/pipeline/config.hpp"
#include "tennis/pipeline/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitStage = 4;

struct GlobalFlags {
  std::string config_path;
  std::string profile;
  std::string data_dir;
  std::string out_dir;
  std::string players;
  std::string epsilon;
  std::string kernel;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool force = false;
  bool quiet = false;
};

tennis::pipeline::PipelineConfig build_config(const GlobalFlags& flags) {
  using tennis::pipeline::PipelineConfig;
  PipelineConfig cfg = flags.config_path.empty()
                           ? tennis::pipeline::default_config()
                           : tennis::pipeline::load_config(flags.config_path);
  if (!flags.data_dir.empty()) cfg.data_dir = flags.data_dir;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.players.empty()) cfg.players_filter = flags.players;
  if (!flags.kernel.empty()) cfg.kernel = flags.kernel;
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (!flags.profile.empty()) cfg.profile = flags.profile;
  if (!flags.epsilon.empty()) {
    cfg.epsilon_list.clear();
    std::stringstream ss(flags.epsilon);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.epsilon_list.push_back(std::stod(item));
    }
  }
  tennis::pipeline::apply_profile(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov-chain game model, Pareto frontiers and efficiency analytics for "
               "Grand Slam point-by-point data"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "Path to a key = value config file");
  app.add_option("--profile", flags.profile, "Parameter profile: full or reduced")
      ->check(CLI::IsMember({"full", "reduced"}));
  app.add_option("--data-dir", flags.data_dir, "Directory of *-points.csv / *-matches.csv");
  app.add_option("--out-dir", flags.out_dir, "Artifact directory");
  app.add_option("--players", flags.players, "Comma-separated player-name filters");
  app.add_option("--epsilon", flags.epsilon, "Comma-separated constraint half-widths");
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--jobs", flags.jobs, "Worker threads for the frontier stage")
      ->check(CLI::PositiveNumber);
  app.add_option("--kernel", flags.kernel, "Batch kernel: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));
  app.add_flag("--force", flags.force, "Recompute even when manifests match");
  app.add_flag("--quiet", flags.quiet, "Suppress progress logging");

  for (const std::string stage :
       {"ingest", "fit", "frontier", "metrics", "stats", "report", "all"}) {
    app.add_subcommand(stage, "Run the " + stage + (stage == "all" ? " stages" : " stage"))
        ->fallthrough();
  }

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo sanity run against the solver");
  simulate->fallthrough();
  tennis::pipeline::SimulateOptions sim_options;
  simulate->add_option("--p", sim_options.constant_p, "Constant point-winning probability")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--strategy", sim_options.strategy_file,
                       "JSON array of 18 per-state probabilities");
  simulate->add_option("--games", sim_options.games, "Number of games")->check(CLI::PositiveNumber);
  simulate->add_option("--sim-seed", sim_options.seed, "Simulation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      std::cout << tennis::pipeline::run_simulate(sim_options);
      return kExitOk;
    }
    const auto cfg = build_config(flags);
    tennis::pipeline::StageOptions options;
    options.force = flags.force;
    options.jobs = flags.jobs;
    options.quiet = flags.quiet;
    tennis::pipeline::Pipeline pipeline(cfg, options);
    const std::string stage = app.get_subcommands().front()->get_name();
    if (stage == "all") {
      pipeline.run_all();
    } else {
      pipeline.run_stage(stage);
    }
    return kExitOk;
  } catch (const tennis::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tennis::StageDependencyError& e) {
    std::cerr << "stage dependency error: " << e.what() << '\n';
    return kExitStage;
  } catch (const tennis::SchemaError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const tennis::EmptyInputError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const tennis::SegmentationError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const tennis::EstimationError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
