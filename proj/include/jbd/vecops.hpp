#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

// Sequential vector kernels. Every loop runs in ascending index order so that
// repeated runs of the same build produce bit-identical floating point results.

namespace jbd {

inline double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

inline double nrm2(std::span<const double> x) {
  // Two-pass scaled norm; safe for the magnitudes this library works with.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : x) {
    const double t = v / scale;
    acc += t * t;
  }
  return scale * std::sqrt(acc);
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

inline std::vector<double> scaled_copy(double a, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i];
  return out;
}

}  // namespace jbd
