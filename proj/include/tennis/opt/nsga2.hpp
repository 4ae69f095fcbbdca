#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tennis/opt/frontier.hpp"

namespace tennis::opt {

struct Nsga2Params {
  int population = 800;
  int max_generations = 400;
  // Stop when the relative change of the first-front mean crowding spread
  // over stall_window generations falls below function_tolerance.
  double function_tolerance = 1e-4;
  int stall_window = 50;
  double crossover_rate = 0.8;
  // Cap on first-front survivors per generation, trimmed by crowding
  // distance; capped-out members refill only when later fronts run dry.
  double pareto_fraction = 0.6;
  double sbx_eta = 20.0;
  double mutation_eta = 20.0;
  double mutation_rate = -1.0;  // < 0 selects 1/dim
};

// Bi-objective minimization with one aggregate constraint; violation 0 means
// feasible. evaluate fills objectives and violations for n genomes laid out
// contiguously (n * dim doubles). It must be pure: results may be computed in
// any order or in parallel but may depend only on the genome.
struct Problem {
  int dim = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<void(const double* genomes, std::size_t n, Obj2* objectives, double* violations)>
      evaluate;
};

struct Individual {
  std::vector<double> x;
  Obj2 objectives{};
  double violation = 0.0;
};

struct RunResult {
  std::vector<Individual> population;
  int generations = 0;
  bool converged = false;  // stopped on the spread criterion before the cap
};

// Generational NSGA-II with feasibility-first binary tournaments, simulated
// binary crossover, polynomial mutation, and elitist environmental selection
// under constrained non-dominated sorting. Deterministic given (problem,
// params, seed).
RunResult nsga2_run(const Problem& problem, const Nsga2Params& params, std::uint64_t seed);

// Indices of the feasible, mutually non-dominated members of a population,
// in stable order.
std::vector<int> feasible_front(const std::vector<Individual>& population);

}  // namespace tennis::opt
