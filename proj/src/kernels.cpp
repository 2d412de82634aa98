#include "varcalc/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

#include <omp.h>

namespace varcalc::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::kParallel};
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

Batch evaluate_serial(int count, const IndexFn& fn) {
  Batch out;
  out.values.resize(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    try {
      out.values[static_cast<size_t>(i)] = fn(i);
    } catch (const std::exception&) {
      out.values[static_cast<size_t>(i)] = kNaN;
      ++out.errors;
    }
  }
  return out;
}

Batch evaluate_parallel(int count, const IndexFn& fn) {
  Batch out;
  out.values.resize(static_cast<size_t>(count));
  int errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors)
  for (int i = 0; i < count; ++i) {
    try {
      out.values[static_cast<size_t>(i)] = fn(i);
    } catch (const std::exception&) {
      out.values[static_cast<size_t>(i)] = kNaN;
      ++errors;
    }
  }
  out.errors = errors;
  return out;
}

Batch evaluate(int count, const IndexFn& fn) {
  return backend() == Backend::kSerial ? evaluate_serial(count, fn) : evaluate_parallel(count, fn);
}

ArgMin argmin(const std::vector<double>& values) {
  ArgMin out;
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    if (out.index < 0 || v < out.value) {
      out.index = static_cast<int>(i);
      out.value = v;
    }
  }
  return out;
}

ArgMin argmax(const std::vector<double>& values) {
  ArgMin out;
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    if (out.index < 0 || v > out.value) {
      out.index = static_cast<int>(i);
      out.value = v;
    }
  }
  return out;
}

}  // namespace varcalc::kernels
