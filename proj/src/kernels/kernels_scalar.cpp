#include "toriclab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace toriclab::kernels::scalar {

double max_affine(const double* base, const double* t, std::size_t n, double slope) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, base[i] + slope * t[i]);
  return m;
}

double sum_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                      double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(base[i] + slope * t[i] - shift);
  return s;
}

void accumulate_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                           double shift, double scale, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] += scale * std::exp(base[i] + slope * t[i] - shift);
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

}  // namespace toriclab::kernels::scalar
