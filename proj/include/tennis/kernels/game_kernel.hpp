#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace tennis::kernels {

// Batched game evaluation used in optimizer inner loops. One call evaluates
// many strategies (18 doubles each, contiguous, canonical state order).
//
// Implementations share a single arithmetic sequence (see game_eval.hpp), so
// the scalar reference and the SIMD variants produce bit-identical doubles;
// runtime selection can never change a result. The batched path solves the
// chain by forward substitution through the score graph with the deuce cycle
// summed in closed form, and agrees with solve_chain() to ~1e-14.
struct KernelOutcome {
  double win = 0.0;
  double loss = 0.0;
  double expected_points = 0.0;
  double induced_avg = 0.0;  // visit-weighted mean point-winning probability
};

enum class Impl {
  scalar,
  avx2,
};

using BatchFn = void (*)(const double* genomes, std::size_t n, KernelOutcome* out);

// Function for a specific implementation; nullptr when it was not compiled in
// or the CPU lacks the instruction set.
BatchFn batch_fn(Impl impl);

// Widest implementation this CPU supports.
Impl best_impl();

// best_impl() unless overridden via set_impl_override or the TENNIS_KERNEL
// environment variable ("scalar", "avx2", "auto").
Impl active_impl();
void set_impl_override(std::optional<Impl> impl);

std::string_view impl_name(Impl impl);
std::optional<Impl> impl_from_name(std::string_view name);

// Evaluates with the active implementation.
void evaluate_batch(const double* genomes, std::size_t n, KernelOutcome* out);

}  // namespace tennis::kernels
