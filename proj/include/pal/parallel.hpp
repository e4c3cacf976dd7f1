#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace pal {

/// Serial is the reference path; Parallel distributes indices over OpenMP
/// threads. Kernels that take an Exec give identical results either way.
enum class Exec { kSerial, kParallel };

/// Threads used by Exec::kParallel. Defaults to PAL_THREADS, else OpenMP's default.
int thread_count();
void set_thread_count(int n);

namespace detail {
void parallel_for_impl(std::size_t n, void (*body)(void*, std::size_t), void* ctx);
}

/// Calls f(i) for i in [0, n). The first exception thrown by any call is rethrown.
template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
  if (exec == Exec::kSerial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  struct Ctx {
    F* f;
    std::exception_ptr error;
    std::mutex mu;
  } ctx{&f, nullptr, {}};
  detail::parallel_for_impl(
      n,
      [](void* p, std::size_t i) {
        auto* c = static_cast<Ctx*>(p);
        try {
          (*c->f)(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(c->mu);
          if (!c->error) c->error = std::current_exception();
        }
      },
      &ctx);
  if (ctx.error) std::rethrow_exception(ctx.error);
}

}  // namespace pal
