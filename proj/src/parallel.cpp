#include "pal/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace pal {

namespace {
int g_threads = 0;

int env_threads() {
  if (const char* s = std::getenv("PAL_THREADS")) {
    try {
      const int n = std::stoi(s);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return 0;
}
}  // namespace

int thread_count() {
  if (g_threads > 0) return g_threads;
  if (const int n = env_threads(); n > 0) return n;
  return omp_get_max_threads();
}

void set_thread_count(int n) { g_threads = n > 0 ? n : 0; }

namespace detail {

void parallel_for_impl(std::size_t n, void (*body)(void*, std::size_t), void* ctx) {
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count())
  for (long long i = 0; i < count; ++i) body(ctx, static_cast<std::size_t>(i));
}

}  // namespace detail
}  // namespace pal
