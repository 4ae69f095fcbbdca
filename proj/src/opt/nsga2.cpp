#include "tennis/opt/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tennis/errors.hpp"
#include "tennis/rng.hpp"

namespace tennis::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pool {
  int dim = 0;
  std::vector<double> x;     // n * dim genomes
  std::vector<Obj2> f;
  std::vector<double> viol;

  std::size_t size() const { return viol.size(); }
  double* genome(std::size_t i) { return x.data() + i * static_cast<std::size_t>(dim); }
  const double* genome(std::size_t i) const {
    return x.data() + i * static_cast<std::size_t>(dim);
  }
  void resize(std::size_t n) {
    x.resize(n * static_cast<std::size_t>(dim));
    f.resize(n);
    viol.resize(n);
  }
};

bool feasible(double violation) { return violation <= 0.0; }

// Deb's constrained-domination rule: feasible beats infeasible, smaller
// violation beats larger, objective dominance decides among the feasible.
// Under constrained domination every feasible individual dominates every
// infeasible one, so the partition is the feasible objective fronts followed
// by the infeasible individuals laddered by violation (equal violations
// share a front). Equivalent to fronts_by over constrained_dominates, at
// O(n log n) instead of O(n^2).
std::vector<std::vector<int>> constrained_fronts(const Pool& pool) {
  std::vector<int> feasible_idx;
  std::vector<int> infeasible_idx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (feasible(pool.viol[i]) ? feasible_idx : infeasible_idx).push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> fronts;
  if (!feasible_idx.empty()) {
    std::vector<Obj2> objs;
    objs.reserve(feasible_idx.size());
    for (int i : feasible_idx) objs.push_back(pool.f[static_cast<std::size_t>(i)]);
    for (auto& front : nondominated_fronts(objs)) {
      std::vector<int> mapped;
      mapped.reserve(front.size());
      for (int k : front) mapped.push_back(feasible_idx[static_cast<std::size_t>(k)]);
      fronts.push_back(std::move(mapped));
    }
  }
  if (!infeasible_idx.empty()) {
    std::stable_sort(infeasible_idx.begin(), infeasible_idx.end(), [&](int a, int b) {
      return pool.viol[static_cast<std::size_t>(a)] < pool.viol[static_cast<std::size_t>(b)];
    });
    std::size_t i = 0;
    while (i < infeasible_idx.size()) {
      std::size_t j = i;
      std::vector<int> group;
      while (j < infeasible_idx.size() &&
             pool.viol[static_cast<std::size_t>(infeasible_idx[j])] ==
                 pool.viol[static_cast<std::size_t>(infeasible_idx[i])]) {
        group.push_back(infeasible_idx[j]);
        ++j;
      }
      std::sort(group.begin(), group.end());
      fronts.push_back(std::move(group));
      i = j;
    }
  }
  return fronts;
}

std::vector<double> front_crowding(const Pool& pool, const std::vector<int>& front) {
  std::vector<Obj2> objs;
  objs.reserve(front.size());
  for (int i : front) objs.push_back(pool.f[static_cast<std::size_t>(i)]);
  return crowding_distance(objs);
}

// Bounded simulated binary crossover for one gene pair.
void sbx_gene(double& c1, double& c2, double lo, double hi, double eta, Rng& rng) {
  if (std::fabs(c1 - c2) <= 1e-14) return;
  const double y1 = std::min(c1, c2);
  const double y2 = std::max(c1, c2);
  const double u = rng.u01();
  const double exp = 1.0 / (eta + 1.0);

  double beta = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
  double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
  double betaq = (u <= 1.0 / alpha) ? std::pow(u * alpha, exp)
                                    : std::pow(1.0 / (2.0 - u * alpha), exp);
  double child1 = 0.5 * ((y1 + y2) - betaq * (y2 - y1));

  beta = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
  alpha = 2.0 - std::pow(beta, -(eta + 1.0));
  betaq = (u <= 1.0 / alpha) ? std::pow(u * alpha, exp)
                             : std::pow(1.0 / (2.0 - u * alpha), exp);
  double child2 = 0.5 * ((y1 + y2) + betaq * (y2 - y1));

  child1 = std::clamp(child1, lo, hi);
  child2 = std::clamp(child2, lo, hi);
  if (rng.u01() <= 0.5) std::swap(child1, child2);
  c1 = child1;
  c2 = child2;
}

// Bounded polynomial mutation for one gene.
double mutate_gene(double y, double lo, double hi, double eta, Rng& rng) {
  const double span = hi - lo;
  if (span <= 0.0) return y;
  const double u = rng.u01();
  const double mut_pow = 1.0 / (eta + 1.0);
  double deltaq;
  if (u < 0.5) {
    const double delta = (y - lo) / span;
    const double xy = 1.0 - delta;
    const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
    deltaq = std::pow(val, mut_pow) - 1.0;
  } else {
    const double delta = (hi - y) / span;
    const double xy = 1.0 - delta;
    const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
    deltaq = 1.0 - std::pow(val, mut_pow);
  }
  return std::clamp(y + deltaq * span, lo, hi);
}

}  // namespace

RunResult nsga2_run(const Problem& problem, const Nsga2Params& params, std::uint64_t seed) {
  if (problem.dim <= 0 || static_cast<int>(problem.lower.size()) != problem.dim ||
      static_cast<int>(problem.upper.size()) != problem.dim || !problem.evaluate) {
    throw ContractViolation("malformed optimization problem");
  }
  if (params.population < 4 || params.population % 2 != 0) {
    throw ContractViolation("population must be an even number >= 4");
  }

  const int dim = problem.dim;
  const std::size_t n = static_cast<std::size_t>(params.population);
  const double pm = params.mutation_rate < 0.0 ? 1.0 / static_cast<double>(dim)
                                               : params.mutation_rate;
  Rng rng(seed);

  Pool parents;
  parents.dim = dim;
  parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* g = parents.genome(i);
    for (int d = 0; d < dim; ++d) {
      g[d] = rng.uniform(problem.lower[static_cast<std::size_t>(d)],
                         problem.upper[static_cast<std::size_t>(d)]);
    }
  }
  problem.evaluate(parents.x.data(), n, parents.f.data(), parents.viol.data());

  Pool offspring;
  offspring.dim = dim;
  offspring.resize(n);
  Pool combined;
  combined.dim = dim;

  std::vector<double> spread_history;
  RunResult result;

  for (int gen = 0; gen < params.max_generations; ++gen) {
    // Rank and crowding of the current parents drive tournament selection.
    const auto fronts = constrained_fronts(parents);
    std::vector<int> rank(n, 0);
    std::vector<double> crowd(n, 0.0);
    for (std::size_t k = 0; k < fronts.size(); ++k) {
      const auto cd = front_crowding(parents, fronts[k]);
      for (std::size_t m = 0; m < fronts[k].size(); ++m) {
        rank[static_cast<std::size_t>(fronts[k][m])] = static_cast<int>(k);
        crowd[static_cast<std::size_t>(fronts[k][m])] = cd[m];
      }
    }

    auto better = [&](std::size_t a, std::size_t b) {
      const bool a_ok = feasible(parents.viol[a]);
      const bool b_ok = feasible(parents.viol[b]);
      if (a_ok != b_ok) return a_ok ? a : b;
      if (!a_ok) return parents.viol[a] <= parents.viol[b] ? a : b;
      if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
      if (crowd[a] != crowd[b]) return crowd[a] > crowd[b] ? a : b;
      return a;
    };
    auto tournament = [&]() {
      const std::size_t a = rng.index(n);
      const std::size_t b = rng.index(n);
      return better(a, b);
    };

    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      const std::size_t pa = tournament();
      const std::size_t pb = tournament();
      double* c1 = offspring.genome(2 * pair);
      double* c2 = offspring.genome(2 * pair + 1);
      std::copy_n(parents.genome(pa), dim, c1);
      std::copy_n(parents.genome(pb), dim, c2);
      if (rng.u01() <= params.crossover_rate) {
        for (int d = 0; d < dim; ++d) {
          if (rng.u01() <= 0.5) {
            sbx_gene(c1[d], c2[d], problem.lower[static_cast<std::size_t>(d)],
                     problem.upper[static_cast<std::size_t>(d)], params.sbx_eta, rng);
          }
        }
      }
      for (double* child : {c1, c2}) {
        for (int d = 0; d < dim; ++d) {
          if (rng.u01() <= pm) {
            child[d] = mutate_gene(child[d], problem.lower[static_cast<std::size_t>(d)],
                                   problem.upper[static_cast<std::size_t>(d)],
                                   params.mutation_eta, rng);
          }
        }
      }
    }
    problem.evaluate(offspring.x.data(), n, offspring.f.data(), offspring.viol.data());

    // Elitist environmental selection over parents + offspring.
    combined.resize(2 * n);
    std::copy(parents.x.begin(), parents.x.end(), combined.x.begin());
    std::copy(offspring.x.begin(), offspring.x.end(),
              combined.x.begin() + static_cast<std::ptrdiff_t>(parents.x.size()));
    std::copy(parents.f.begin(), parents.f.end(), combined.f.begin());
    std::copy(offspring.f.begin(), offspring.f.end(),
              combined.f.begin() + static_cast<std::ptrdiff_t>(n));
    std::copy(parents.viol.begin(), parents.viol.end(), combined.viol.begin());
    std::copy(offspring.viol.begin(), offspring.viol.end(),
              combined.viol.begin() + static_cast<std::ptrdiff_t>(n));

    const auto all_fronts = constrained_fronts(combined);
    const std::size_t front_cap = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(params.pareto_fraction * static_cast<double>(n))));

    std::vector<int> selected;
    selected.reserve(n);
    std::vector<int> capped_out;  // first-front members beyond the cap
    for (std::size_t k = 0; k < all_fronts.size() && selected.size() < n; ++k) {
      const auto& front = all_fronts[k];
      const std::size_t room = n - selected.size();
      const std::size_t allowed = (k == 0) ? std::min(room, front_cap) : room;
      if (front.size() <= allowed) {
        selected.insert(selected.end(), front.begin(), front.end());
        continue;
      }
      const auto cd = front_crowding(combined, front);
      std::vector<int> order(front.size());
      for (std::size_t m = 0; m < front.size(); ++m) order[m] = static_cast<int>(m);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return cd[static_cast<std::size_t>(a)] > cd[static_cast<std::size_t>(b)];
      });
      for (std::size_t m = 0; m < order.size(); ++m) {
        const int idx = front[static_cast<std::size_t>(order[m])];
        if (m < allowed) {
          selected.push_back(idx);
        } else if (k == 0) {
          capped_out.push_back(idx);
        }
      }
    }
    // The cap can starve the selection when dominated individuals run out;
    // refill from the capped-out members, best crowding first.
    for (std::size_t m = 0; selected.size() < n && m < capped_out.size(); ++m) {
      selected.push_back(capped_out[m]);
    }

    Pool next;
    next.dim = dim;
    next.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto src = static_cast<std::size_t>(selected[i]);
      std::copy_n(combined.genome(src), dim, next.genome(i));
      next.f[i] = combined.f[src];
      next.viol[i] = combined.viol[src];
    }
    parents = std::move(next);
    result.generations = gen + 1;

    // Spread stall detection on the new parents' first front.
    const auto new_fronts = constrained_fronts(parents);
    double spread = 0.0;
    if (!new_fronts.empty()) {
      const auto cd = front_crowding(parents, new_fronts[0]);
      double sum = 0.0;
      int count = 0;
      for (double d : cd) {
        if (d != kInf) {
          sum += d;
          ++count;
        }
      }
      spread = count > 0 ? sum / count : 0.0;
    }
    spread_history.push_back(spread);
    if (static_cast<int>(spread_history.size()) > params.stall_window) {
      const double base =
          spread_history[spread_history.size() - 1 - static_cast<std::size_t>(params.stall_window)];
      const double rel = std::fabs(spread - base) / std::max(std::fabs(base), 1e-30);
      if (rel < params.function_tolerance) {
        result.converged = true;
        break;
      }
    }
  }

  result.population.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Individual ind;
    ind.x.assign(parents.genome(i), parents.genome(i) + dim);
    ind.objectives = parents.f[i];
    ind.violation = parents.viol[i];
    result.population.push_back(std::move(ind));
  }
  return result;
}

std::vector<int> feasible_front(const std::vector<Individual>& population) {
  std::vector<int> feasible_idx;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (feasible(population[i].violation)) feasible_idx.push_back(static_cast<int>(i));
  }
  std::vector<int> front;
  for (int i : feasible_idx) {
    bool dominated_by_any = false;
    for (int j : feasible_idx) {
      if (j != i && dominates_min(population[static_cast<std::size_t>(j)].objectives,
                                  population[static_cast<std::size_t>(i)].objectives)) {
        dominated_by_any = true;
        break;
      }
    }
    if (!dominated_by_any) front.push_back(i);
  }
  return front;
}

}  // namespace tennis::opt
