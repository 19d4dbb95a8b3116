#pragma once

// Data-parallel inner loops used by the quadrature code. Every kernel has a
// portable scalar reference and, on x86-64, an AVX2+FMA variant chosen at
// runtime. The two must agree to a few ulps; see tests/test_kernels.cpp.

#include <span>
#include <string_view>

namespace toriclab::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend used by the free functions below. Defaults to the best one the
/// CPU supports.
Backend active_backend() noexcept;

/// Forces a backend. Requesting Avx2 on a CPU without it falls back to
/// Scalar; the return value is the backend actually installed.
Backend set_backend(Backend b) noexcept;

bool avx2_supported() noexcept;
std::string_view backend_name(Backend b) noexcept;

/// max_i base[i] + slope * t[i]
double max_affine(std::span<const double> base, std::span<const double> t, double slope);

/// sum_i exp(base[i] + slope * t[i] - shift)
double sum_exp_affine(std::span<const double> base, std::span<const double> t, double slope,
                      double shift);

/// out[i] += scale * exp(base[i] + slope * t[i] - shift)
void accumulate_exp_affine(std::span<const double> base, std::span<const double> t, double slope,
                           double shift, double scale, std::span<double> out);

/// sum_i a[i] * b[i] * c[i]
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);

// Explicit variants, exposed for equivalence tests and benchmarks.
namespace scalar {
double max_affine(const double* base, const double* t, std::size_t n, double slope);
double sum_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                      double shift);
void accumulate_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                           double shift, double scale, double* out);
double dot3(const double* a, const double* b, const double* c, std::size_t n);
}  // namespace scalar

namespace avx2 {
double max_affine(const double* base, const double* t, std::size_t n, double slope);
double sum_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                      double shift);
void accumulate_exp_affine(const double* base, const double* t, std::size_t n, double slope,
                           double shift, double scale, double* out);
double dot3(const double* a, const double* b, const double* c, std::size_t n);
}  // namespace avx2

}  // namespace toriclab::kernels
