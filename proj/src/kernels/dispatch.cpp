#include "tennis/kernels/game_kernel.hpp"

#include <atomic>
#include <cstdlib>

namespace tennis::kernels {

void batch_scalar(const double* genomes, std::size_t n, KernelOutcome* out);
#if defined(TENNIS_KERNEL_AVX2_COMPILED)
void batch_avx2(const double* genomes, std::size_t n, KernelOutcome* out);
#endif

namespace {

bool cpu_has_avx2() {
#if defined(TENNIS_KERNEL_AVX2_COMPILED) && defined(__GNUC__) && \
    (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// -1 = no override, otherwise an Impl value.
std::atomic<int> g_override{-1};

std::optional<Impl> env_override() {
  const char* env = std::getenv("TENNIS_KERNEL");
  if (env == nullptr) return std::nullopt;
  return impl_from_name(env);
}

}  // namespace

BatchFn batch_fn(Impl impl) {
  switch (impl) {
    case Impl::scalar:
      return &batch_scalar;
    case Impl::avx2:
#if defined(TENNIS_KERNEL_AVX2_COMPILED)
      return cpu_has_avx2() ? &batch_avx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Impl best_impl() { return cpu_has_avx2() ? Impl::avx2 : Impl::scalar; }

void set_impl_override(std::optional<Impl> impl) {
  g_override.store(impl ? static_cast<int>(*impl) : -1);
}

Impl active_impl() {
  const int forced = g_override.load();
  if (forced >= 0) {
    const Impl impl = static_cast<Impl>(forced);
    if (batch_fn(impl) != nullptr) return impl;
    return Impl::scalar;
  }
  static const std::optional<Impl> env = env_override();
  if (env && batch_fn(*env) != nullptr) return *env;
  return best_impl();
}

std::string_view impl_name(Impl impl) {
  switch (impl) {
    case Impl::scalar:
      return "scalar";
    case Impl::avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Impl> impl_from_name(std::string_view name) {
  if (name == "scalar") return Impl::scalar;
  if (name == "avx2") return Impl::avx2;
  return std::nullopt;  // "auto" and anything else fall back to best_impl
}

void evaluate_batch(const double* genomes, std::size_t n, KernelOutcome* out) {
  batch_fn(active_impl())(genomes, n, out);
}

}  // namespace tennis::kernels
