#include "ttlab/kernels.hpp"

#include <atomic>

namespace ttlab::simd {
namespace {

enum class Backend { Auto, Scalar, Avx2 };

std::atomic<Backend> g_forced{Backend::Auto};

const KernelTable* pick() {
#if defined(__x86_64__) || defined(_M_X64)
  Backend f = g_forced.load(std::memory_order_relaxed);
  if (f == Backend::Scalar) return &kScalar;
  if (f == Backend::Avx2) return &kAvx2;
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
  return &kScalar;
#else
  return &kScalar;
#endif
}

}  // namespace

const KernelTable& active() { return *pick(); }

std::string active_name() {
#if defined(__x86_64__) || defined(_M_X64)
  return &active() == &kAvx2 ? "avx2" : "scalar";
#else
  return "scalar";
#endif
}

void force_backend(const std::string& name) {
  if (name == "scalar") {
    g_forced.store(Backend::Scalar, std::memory_order_relaxed);
  } else if (name == "avx2") {
    g_forced.store(Backend::Avx2, std::memory_order_relaxed);
  } else {
    g_forced.store(Backend::Auto, std::memory_order_relaxed);
  }
}

}  // namespace ttlab::simd
