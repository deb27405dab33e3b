#include <atomic>
#include <cstdlib>
#include <vector>

#include "variants.hpp"

namespace steer::kernels {
namespace {

std::vector<const KernelTable*> detect() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
#if defined(STEER_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    out.push_back(&avx2_kernels());
  }
#endif
#if defined(STEER_HAVE_NEON)
  out.push_back(&neon_kernels());  // baseline on aarch64
#endif
  return out;
}

const std::vector<const KernelTable*>& registry() {
  static const std::vector<const KernelTable*> tables = detect();
  return tables;
}

const KernelTable* find(std::string_view name) {
  for (const KernelTable* t : registry()) {
    if (t->name == name) return t;
  }
  return nullptr;
}

const KernelTable* initial() {
  if (const char* env = std::getenv("STEER_KERNELS")) {
    if (const KernelTable* t = find(env)) return t;
  }
  return registry().back();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial()};
  return table;
}

}  // namespace

std::span<const KernelTable* const> available() { return registry(); }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* t = find(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace steer::kernels
