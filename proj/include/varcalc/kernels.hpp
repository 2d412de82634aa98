#pragma once

#include <functional>
#include <vector>

namespace varcalc::kernels {

enum class Backend { kSerial, kParallel };
// Process-wide default used by the estimators; the serial path is the reference.
void set_backend(Backend b);
Backend backend();

// fn(i) for i in [0, count). Exceptions thrown by fn become NaN and are counted.
using IndexFn = std::function<double(int)>;
struct Batch {
  std::vector<double> values;
  int errors = 0;
};
Batch evaluate_serial(int count, const IndexFn& fn);
Batch evaluate_parallel(int count, const IndexFn& fn);
Batch evaluate(int count, const IndexFn& fn);

// Smallest non-NaN value with lowest-index tie-break; index −1 when all NaN.
struct ArgMin {
  int index = -1;
  double value = 0;
};
ArgMin argmin(const std::vector<double>& values);
// Same ordering for maxima.
ArgMin argmax(const std::vector<double>& values);

}  // namespace varcalc::kernels
