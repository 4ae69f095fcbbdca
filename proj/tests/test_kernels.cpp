#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "tennis/game_chain.hpp"
#include "tennis/kernels/game_kernel.hpp"
#include "tennis/rng.hpp"
#include "tennis/strategy.hpp"

namespace kernels = tennis::kernels;

namespace {

std::vector<double> random_genomes(std::size_t n, std::uint64_t seed, double lo, double hi) {
  tennis::Rng rng(seed);
  std::vector<double> g(n * 18);
  for (double& x : g) x = rng.uniform(lo, hi);
  return g;
}

}  // namespace

TEST_CASE("scalar kernel agrees with the exact chain solve") {
  const std::size_t n = 500;
  const auto genomes = random_genomes(n, 5150, 0.02, 0.98);
  std::vector<kernels::KernelOutcome> out(n);
  kernels::batch_fn(kernels::Impl::scalar)(genomes.data(), n, out.data());
  for (std::size_t i = 0; i < n; ++i) {
    tennis::StrategyVector s;
    std::memcpy(s.p.data(), genomes.data() + i * 18, 18 * sizeof(double));
    const auto exact = tennis::solve_chain(s);
    CHECK(std::fabs(out[i].win - exact.win_probability) < 1e-12);
    CHECK(std::fabs(out[i].loss - exact.loss_probability) < 1e-12);
    CHECK(std::fabs(out[i].expected_points - exact.expected_points) < 1e-11);
    CHECK(std::fabs(out[i].induced_avg - tennis::induced_average_pwp(s, exact)) < 1e-12);
  }
}

TEST_CASE("scalar kernel flags a locked deuce cycle through the absorption mass") {
  std::vector<double> genome(18, 0.5);
  genome[16] = 0.0;  // advantage-in always returns to deuce
  genome[17] = 1.0;  // advantage-out always returns to deuce
  kernels::KernelOutcome out;
  kernels::batch_fn(kernels::Impl::scalar)(genome.data(), 1, &out);
  CHECK(!(std::fabs(out.win + out.loss - 1.0) <= 1e-9));
}

TEST_CASE("avx2 kernel is bit-identical to the scalar reference") {
  if (kernels::batch_fn(kernels::Impl::avx2) == nullptr) {
    MESSAGE("avx2 not available on this host; skipping");
    return;
  }
  // Odd count exercises the remainder path.
  const std::size_t n = 1001;
  const auto genomes = random_genomes(n, 90210, 0.01, 0.99);
  std::vector<kernels::KernelOutcome> scalar_out(n), avx_out(n);
  kernels::batch_fn(kernels::Impl::scalar)(genomes.data(), n, scalar_out.data());
  kernels::batch_fn(kernels::Impl::avx2)(genomes.data(), n, avx_out.data());
  CHECK(std::memcmp(scalar_out.data(), avx_out.data(), n * sizeof(kernels::KernelOutcome)) == 0);
}

TEST_CASE("kernel override selects a working implementation") {
  kernels::set_impl_override(kernels::Impl::scalar);
  CHECK(kernels::active_impl() == kernels::Impl::scalar);
  kernels::set_impl_override(std::nullopt);
  CHECK(kernels::batch_fn(kernels::active_impl()) != nullptr);
  CHECK(kernels::impl_from_name("avx2") == kernels::Impl::avx2);
  CHECK(!kernels::impl_from_name("auto").has_value());
}
