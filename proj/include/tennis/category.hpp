#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "tennis/errors.hpp"

namespace tennis {

enum class Tour { Men, Women };
enum class Role { Service, Return };

inline std::string_view tour_name(Tour t) { return t == Tour::Men ? "men" : "women"; }
inline std::string_view role_name(Role r) { return r == Role::Service ? "service" : "return"; }

inline std::optional<Tour> tour_from_name(std::string_view s) {
  if (s == "men") return Tour::Men;
  if (s == "women") return Tour::Women;
  return std::nullopt;
}
inline std::optional<Role> role_from_name(std::string_view s) {
  if (s == "service") return Role::Service;
  if (s == "return") return Role::Return;
  return std::nullopt;
}

// Optimizer settings for one tour/role category.
//
// The search box is category specific; the box width delta_p doubles as the
// normalizer of the strategy-fit distance. The constraint keeps a candidate's
// average point-winning probability within +/- epsilon of the player's
// observed average.
struct CategoryConfig {
  double search_lo = 0.25;
  double search_hi = 0.50;
  double epsilon = 0.005;
  int population = 800;
  int max_generations = 400;
  double function_tolerance = 1e-4;
  double crossover_rate = 0.8;
  double pareto_fraction = 0.6;
  int n_seeds = 30;
  // Constraint average: visit-weighted induced average when true (matches the
  // empirical points-won / points-played definition), otherwise the plain
  // mean of the 18 entries.
  bool weighted_constraint = true;

  double delta_p() const { return search_hi - search_lo; }
};

inline CategoryConfig default_category(Tour tour, Role role) {
  CategoryConfig cfg;
  if (tour == Tour::Men && role == Role::Service) {
    cfg.search_lo = 0.50;
    cfg.search_hi = 0.75;
  } else if (tour == Tour::Men && role == Role::Return) {
    cfg.search_lo = 0.25;
    cfg.search_hi = 0.50;
  } else if (tour == Tour::Women && role == Role::Service) {
    cfg.search_lo = 0.40;
    cfg.search_hi = 0.70;
  } else {
    cfg.search_lo = 0.30;
    cfg.search_hi = 0.60;
  }
  return cfg;
}

// Reduced profile: same search problem, cheaper optimizer run. Every artifact
// it touches is labeled with the profile name.
inline CategoryConfig reduced_profile(CategoryConfig cfg) {
  cfg.population = 200;
  cfg.max_generations = 100;
  cfg.n_seeds = 5;
  return cfg;
}

inline std::string category_key(Tour tour, Role role) {
  return std::string(tour_name(tour)) + "_" + std::string(role_name(role));
}

}  // namespace tennis
