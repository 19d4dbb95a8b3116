#include "doctest.h"
#include "toriclab/kernels.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace toriclab::kernels;

namespace {

struct Data {
  std::vector<double> base, t, c;
};

Data make_data(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> b(-40.0, 5.0), tt(-30.0, 30.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.base.push_back(b(rng));
    d.t.push_back(tt(rng));
    d.c.push_back(b(rng) * 0.1);
  }
  return d;
}

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
  if (!avx2_supported()) {
    MESSAGE("AVX2 not available; only the scalar path is exercised");
    return;
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u, 4097u}) {
    const Data d = make_data(n, 17 + static_cast<unsigned>(n));
    for (double slope : {0.0, 0.7, -1.3, 2.0}) {
      // The AVX2 path fuses the multiply-add, so allow one rounding.
      const double m0 = scalar::max_affine(d.base.data(), d.t.data(), n, slope);
      const double m1 = avx2::max_affine(d.base.data(), d.t.data(), n, slope);
      CHECK((m0 == m1 || std::abs(m0 - m1) <= 1e-14 * std::max(1.0, std::abs(m0))));
      const double shift = n ? m0 : 0.0;
      const double s0 = scalar::sum_exp_affine(d.base.data(), d.t.data(), n, slope, shift);
      const double s1 = avx2::sum_exp_affine(d.base.data(), d.t.data(), n, slope, shift);
      CHECK(std::abs(s0 - s1) <= 1e-14 * std::max(1.0, s0));

      std::vector<double> o0(n, 1.0), o1(n, 1.0);
      scalar::accumulate_exp_affine(d.base.data(), d.t.data(), n, slope, shift, 0.5, o0.data());
      avx2::accumulate_exp_affine(d.base.data(), d.t.data(), n, slope, shift, 0.5, o1.data());
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o0[i] - o1[i]) <= 1e-15 * std::abs(o0[i]));
    }
    const double p0 = scalar::dot3(d.base.data(), d.t.data(), d.c.data(), n);
    const double p1 = avx2::dot3(d.base.data(), d.t.data(), d.c.data(), n);
    CHECK(std::abs(p0 - p1) <= 1e-12 * (1.0 + std::abs(p0)));
  }
}

TEST_CASE("avx2 exp handles the underflow range") {
  if (!avx2_supported()) return;
  std::vector<double> base = {-800.0, -745.0, -708.5, -700.0, 0.0, 1.0, 700.0, -1e-300};
  std::vector<double> t(base.size(), 0.0);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::vector<double> out{0.0};
    avx2::accumulate_exp_affine(&base[i], &t[i], 1, 0.0, 0.0, 1.0, out.data());
    const double ref = std::exp(base[i]);
    if (ref < 1e-307) CHECK(out[0] <= 1e-300);
    else CHECK(std::abs(out[0] - ref) <= 4e-16 * ref);
  }
}

TEST_CASE("backend switching") {
  const Backend before = active_backend();
  CHECK(set_backend(Backend::Scalar) == Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);
  std::vector<double> b = {0.0, 1.0}, t = {1.0, 2.0};
  CHECK(max_affine(b, t, 1.0) == doctest::Approx(3.0));
  set_backend(before);
  CHECK(backend_name(Backend::Avx2) == "avx2");
}
