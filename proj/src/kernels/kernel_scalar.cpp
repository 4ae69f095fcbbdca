#include "tennis/kernels/game_kernel.hpp"

#include "game_eval.hpp"

namespace tennis::kernels {

namespace {

struct Vec1d {
  double v;
  static Vec1d broadcast(double x) { return {x}; }
  friend Vec1d operator+(Vec1d a, Vec1d b) { return {a.v + b.v}; }
  friend Vec1d operator-(Vec1d a, Vec1d b) { return {a.v - b.v}; }
  friend Vec1d operator*(Vec1d a, Vec1d b) { return {a.v * b.v}; }
  friend Vec1d operator/(Vec1d a, Vec1d b) { return {a.v / b.v}; }
};

}  // namespace

void batch_scalar(const double* genomes, std::size_t n, KernelOutcome* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* g = genomes + i * 18;
    Vec1d p[18];
    for (int k = 0; k < 18; ++k) p[k] = {g[k]};
    const auto r = detail::evaluate_game(p);
    out[i] = {r.win.v, r.loss.v, r.points.v, r.induced_avg.v};
  }
}

}  // namespace tennis::kernels
