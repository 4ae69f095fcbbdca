#include "tennis/opt/pareto.hpp"

#include <cmath>
#include <string>

#include "tennis/errors.hpp"
#include "tennis/kernels/game_kernel.hpp"

namespace tennis::opt {

Problem make_game_problem(double target_avg, const CategoryConfig& config) {
  Problem problem;
  problem.dim = 18;
  problem.lower.assign(18, config.search_lo);
  problem.upper.assign(18, config.search_hi);
  const double epsilon = config.epsilon;
  const bool weighted = config.weighted_constraint;
  problem.evaluate = [target_avg, epsilon, weighted](const double* genomes, std::size_t n,
                                                     Obj2* objectives, double* violations) {
    std::vector<kernels::KernelOutcome> out(n);
    kernels::evaluate_batch(genomes, n, out.data());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& o = out[i];
      if (!(std::fabs(o.win + o.loss - 1.0) <= 1e-9)) {
        // Non-absorbing corner of the box; park it far behind every feasible
        // candidate instead of propagating inf/nan into the sort.
        objectives[i] = {1e9, 1e9};
        violations[i] = 1e9;
        continue;
      }
      objectives[i] = {-o.win, o.expected_points};
      double avg = o.induced_avg;
      if (!weighted) {
        const double* g = genomes + i * 18;
        double sum = 0.0;
        for (int d = 0; d < 18; ++d) sum += g[d];
        avg = sum / 18.0;
      }
      violations[i] = std::max(0.0, std::fabs(avg - target_avg) - epsilon);
    }
  };
  return problem;
}

std::vector<FrontierPoint> nsga2_optimize(double target_avg, const CategoryConfig& config,
                                          std::uint64_t seed) {
  if (target_avg < config.search_lo || target_avg > config.search_hi) {
    throw ContractViolation("target average " + std::to_string(target_avg) +
                            " lies outside the search box");
  }
  Nsga2Params params;
  params.population = config.population;
  params.max_generations = config.max_generations;
  params.function_tolerance = config.function_tolerance;
  params.crossover_rate = config.crossover_rate;
  params.pareto_fraction = config.pareto_fraction;

  const Problem problem = make_game_problem(target_avg, config);
  const RunResult run = nsga2_run(problem, params, seed);

  std::vector<FrontierPoint> points;
  for (int idx : feasible_front(run.population)) {
    const Individual& ind = run.population[static_cast<std::size_t>(idx)];
    FrontierPoint p;
    for (int d = 0; d < 18; ++d) p.strategy[d] = ind.x[static_cast<std::size_t>(d)];
    p.outcome = to_outcome(ind.objectives);
    p.constraint_violation = 0.0;
    p.seed = seed;
    points.push_back(std::move(p));
  }
  return points;
}

Frontier seeded_union(double target_avg, const CategoryConfig& config,
                      std::span<const std::uint64_t> seeds) {
  std::vector<std::vector<FrontierPoint>> runs;
  runs.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    runs.push_back(nsga2_optimize(target_avg, config, seed));
  }
  return merge_frontiers(runs);
}

}  // namespace tennis::opt
