#include <atomic>
#include <cassert>

#include "toriclab/kernels.hpp"

namespace toriclab::kernels {

namespace {

struct Table {
  double (*max_affine)(const double*, const double*, std::size_t, double);
  double (*sum_exp_affine)(const double*, const double*, std::size_t, double, double);
  void (*accumulate_exp_affine)(const double*, const double*, std::size_t, double, double, double,
                                double*);
  double (*dot3)(const double*, const double*, const double*, std::size_t);
};

constexpr Table kScalar{&scalar::max_affine, &scalar::sum_exp_affine,
                        &scalar::accumulate_exp_affine, &scalar::dot3};
constexpr Table kAvx2{&avx2::max_affine, &avx2::sum_exp_affine, &avx2::accumulate_exp_affine,
                      &avx2::dot3};

Backend detect() noexcept { return avx2_supported() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

const Table& table() noexcept {
  return current().load(std::memory_order_relaxed) == Backend::Avx2 ? kAvx2 : kScalar;
}

}  // namespace

bool avx2_supported() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() noexcept { return current().load(); }

Backend set_backend(Backend b) noexcept {
  if (b == Backend::Avx2 && !avx2_supported()) b = Backend::Scalar;
  current().store(b);
  return b;
}

std::string_view backend_name(Backend b) noexcept {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

double max_affine(std::span<const double> base, std::span<const double> t, double slope) {
  assert(base.size() == t.size());
  return table().max_affine(base.data(), t.data(), base.size(), slope);
}

double sum_exp_affine(std::span<const double> base, std::span<const double> t, double slope,
                      double shift) {
  assert(base.size() == t.size());
  return table().sum_exp_affine(base.data(), t.data(), base.size(), slope, shift);
}

void accumulate_exp_affine(std::span<const double> base, std::span<const double> t, double slope,
                           double shift, double scale, std::span<double> out) {
  assert(base.size() == t.size() && out.size() == t.size());
  table().accumulate_exp_affine(base.data(), t.data(), base.size(), slope, shift, scale,
                                out.data());
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  assert(a.size() == b.size() && b.size() == c.size());
  return table().dot3(a.data(), b.data(), c.data(), a.size());
}

}  // namespace toriclab::kernels
