#include "doctest.h"
#include "toriclab/convex.hpp"
#include "toriclab/weight_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace toriclab;

namespace {

double fs_exact(double t, int m) { return 0.5 * m * std::log1p(std::exp(2 * t)); }

// Brute-force sup_t (t x - f(t)) over a dense sample of t.
template <class F>
double dense_conjugate(F&& f, double x, double lo, double hi, int n) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    best = std::max(best, t * x - f(t));
  }
  return best;
}

ToricWeight bumped_fs(int m = 1, double amp = 0.3, std::size_t G = 4096) {
  return make_weight(WeightSpec::perturbed(WeightSpec::fubini_study(m, 30.0, G), amp, 0.5, 1.0));
}

}  // namespace

TEST_CASE("make_weight reference values") {
  const auto fs = make_weight(WeightSpec::fubini_study(1));
  CHECK(fs(0.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-15));
  CHECK(fs.left_slope() == 0.0);
  CHECK(fs.right_slope() == 1.0);
  CHECK(fs.has_minimal_singularities());

  const auto ml = make_weight(WeightSpec::max_linear(1));
  CHECK(ml(-3.0) == 0.0);
  CHECK(ml(3.0) == doctest::Approx(3.0).epsilon(1e-15));

  const auto sh = make_weight(WeightSpec::shifted(WeightSpec::fubini_study(1), 1.0));
  for (std::size_t i = 0; i < fs.values().size(); ++i)
    CHECK(sh.values()[i] - fs.values()[i] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(fs(50.0) == doctest::Approx(fs_exact(50.0, 1)).epsilon(1e-12));
  CHECK(fs(-50.0) == doctest::Approx(fs_exact(-30.0, 1)).epsilon(1e-12));
}

TEST_CASE("make_weight rejects bad specs") {
  CHECK_THROWS_AS(make_weight(WeightSpec::fubini_study(0)), DomainError);
  CHECK_THROWS_AS(make_weight(WeightSpec::fubini_study(1, 30.0, 8)), DomainError);
  CHECK_THROWS_AS(make_weight(WeightSpec::fubini_study(1, std::nan(""), 64)), DomainError);
  CHECK_THROWS_AS(make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1), -0.1)),
                  DomainError);
  CHECK_THROWS_AS(
      make_weight(WeightSpec::perturbed(WeightSpec::fubini_study(1), INFINITY, 0.0, 1.0)),
      DomainError);
}

TEST_CASE("ToricWeight validates invariants") {
  const UniformGrid g = UniformGrid::symmetric(1.0, 16);
  std::vector<double> concave(g.count);
  for (std::size_t i = 0; i < g.count; ++i) concave[i] = -g.at(i) * g.at(i);
  CHECK_THROWS_AS(ToricWeight(1, g, concave, 0.0, 1.0), DomainError);
  std::vector<double> zero(g.count, 0.0);
  CHECK_THROWS_AS(ToricWeight(1, g, zero, 0.0, 2.0), DomainError);   // slope above m
  CHECK_THROWS_AS(ToricWeight(1, g, zero, 0.5, 0.5), DomainError);   // tail breaks convexity
  CHECK_NOTHROW(ToricWeight(1, g, zero, 0.0, 0.5));
}

TEST_CASE("legendre examples") {
  const auto ml = legendre(make_weight(WeightSpec::max_linear(1)));
  for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(ml(x)) < 1e-14);
  CHECK(std::isinf(ml(1.5)));
  CHECK(std::isinf(ml(-0.1)));

  // FS: the closed form and an independent dense maximization.
  auto closed = [](double x) { return 0.5 * (x * std::log(x) + (1 - x) * std::log1p(-x)); };
  auto fine = make_weight(WeightSpec::fubini_study(1, 30.0, 1 << 16));
  const auto cf = legendre(fine);
  for (double x : {0.1, 0.5, 0.9}) {
    const double oracle = dense_conjugate([](double t) { return fs_exact(t, 1); }, x, -30, 30, 2000000);
    CHECK(cf(x) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(cf(x) == doctest::Approx(closed(x)).epsilon(1e-9));
  }
  CHECK(cf(0.5) == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-9));
  // Default resolution: PL interpolation error h^2 max|u''| / 8.
  const auto c = legendre(make_weight(WeightSpec::fubini_study(1)));
  CHECK(std::abs(c(0.5) + 0.5 * std::log(2.0)) < 2e-5);

  // u = t^2/2 on [0,1], flat to the left, slope 1 to the right.
  const UniformGrid g = UniformGrid::symmetric(3.0, 3000);
  std::vector<double> v(g.count);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double t = g.at(i);
    v[i] = t < 0 ? 0.0 : (t < 1 ? 0.5 * t * t : t - 0.5);
  }
  const auto q = legendre(ToricWeight(1, g, v, 0.0, 1.0));
  for (double x : {0.2, 0.5, 0.8}) CHECK(q(x) == doctest::Approx(0.5 * x * x).epsilon(1e-6));
}

TEST_CASE("legendre properties") {
  std::vector<ToricWeight> ws = {make_weight(WeightSpec::fubini_study(1)),
                                 make_weight(WeightSpec::fubini_study(3)),
                                 make_weight(WeightSpec::max_linear(2)), bumped_fs()};
  for (const auto& u : ws) {
    // Biconjugacy on the grid.
    const auto back = inverse_legendre(legendre(u), u.grid(), u.degree());
    double err = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i)
      err = std::max(err, std::abs(back.values()[i] - u.values()[i]));
    CHECK(err <= kTolFenchel);
    CHECK(back.left_slope() == doctest::Approx(u.left_slope()));
    CHECK(back.right_slope() == doctest::Approx(u.right_slope()));

    // Translation.
    const auto a = legendre(u);
    const auto b = legendre(u.shifted(0.6));  // u + 0.3
    for (int i = 0; i <= 20; ++i) {
      const double x = u.left_slope() + (u.right_slope() - u.left_slope()) * i / 20.0;
      CHECK(b(x) == doctest::Approx(a(x) - 0.3).epsilon(1e-12));
    }
  }

  // Order reversal: FS <= FS + bump.
  const auto lo = legendre(make_weight(WeightSpec::fubini_study(1)));
  const auto hi = legendre(bumped_fs());
  for (int i = 0; i <= 100; ++i) CHECK(hi(i / 100.0) <= lo(i / 100.0) + 1e-14);
}

TEST_CASE("legendre refuses singular tails") {
  const auto s = make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1), 0.2));
  CHECK(s.is_singular());
  CHECK_THROWS_AS(legendre(s), DomainError);
}

TEST_CASE("psh_project examples") {
  const UniformGrid g = UniformGrid::symmetric(5.0, 1000);
  GridFunction f{g, std::vector<double>(g.count), -1.0, 1.0, std::nullopt};
  for (std::size_t i = 0; i < g.count; ++i) f.values[i] = std::abs(g.at(i));
  const auto p = psh_project(f, 1);
  for (std::size_t i = 0; i < g.count; ++i)
    CHECK(p.values()[i] == doctest::Approx(std::max(0.0, g.at(i))).epsilon(1e-14));
  CHECK(p.left_slope() == 0.0);
  CHECK(p.right_slope() == 1.0);

  // Identity on admissible input.
  const auto fs = make_weight(WeightSpec::fubini_study(2));
  const auto same = psh_project(fs.as_grid_function(), 2);
  CHECK(std::equal(fs.values().begin(), fs.values().end(), same.values().begin()));

  // Envelope -inf.
  GridFunction bad{g, std::vector<double>(g.count, 0.0), 0.0, -1.0, std::nullopt};
  CHECK_THROWS_AS(psh_project(bad, 1), DomainError);
}

TEST_CASE("psh_project of FS + bump matches a brute-force double conjugate") {
  const int m = 1;
  const UniformGrid g = UniformGrid::symmetric(10.0, 256);
  GridFunction f{g, std::vector<double>(g.count), 0.0, 1.0, std::nullopt};
  for (std::size_t i = 0; i < g.count; ++i) {
    const double t = g.at(i);
    f.values[i] = fs_exact(t, m) + 0.4 * std::exp(-t * t);
  }
  const auto p = psh_project(f, m);

  // f*(x) over grid points; envelope(t) = sup_{x in [0,1]} (x t - f*(x)).
  const int nx = 20000;
  std::vector<double> fstar(nx + 1);
  for (int k = 0; k <= nx; ++k) {
    const double x = static_cast<double>(k) / nx;
    double best = -INFINITY;
    for (std::size_t i = 0; i < g.count; ++i) best = std::max(best, x * g.at(i) - f.values[i]);
    fstar[k] = best;
  }
  bool contact_somewhere = false, gap_somewhere = false;
  for (std::size_t i = 0; i < g.count; ++i) {
    double env = -INFINITY;
    for (int k = 0; k <= nx; ++k) env = std::max(env, g.at(i) * k / nx - fstar[k]);
    CHECK(p.values()[i] == doctest::Approx(env).epsilon(1e-5));
    CHECK(p.values()[i] <= f.values[i] + 1e-15);
    if (p.values()[i] == f.values[i]) contact_somewhere = true;
    if (p.values()[i] < f.values[i] - 1e-3) gap_somewhere = true;
  }
  CHECK(contact_somewhere);
  CHECK(gap_somewhere);
}

TEST_CASE("psh_project properties") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.3);
  const UniformGrid g = UniformGrid::symmetric(8.0, 400);
  for (int trial = 0; trial < 20; ++trial) {
    GridFunction f{g, std::vector<double>(g.count), 0.0, 2.0, std::nullopt};
    for (std::size_t i = 0; i < g.count; ++i) f.values[i] = fs_exact(g.at(i), 2) + noise(rng);
    const auto p = psh_project(f, 2);
    const auto pp = psh_project(p.as_grid_function(), 2);
    CHECK(std::equal(p.values().begin(), p.values().end(), pp.values().begin()));
    // Domination, and maximality against an admissible minorant.
    std::vector<double> w(g.count);
    const double shift = *std::min_element(f.values.begin(), f.values.end());
    for (std::size_t i = 0; i < g.count; ++i) {
      CHECK(p.values()[i] <= f.values[i]);
      w[i] = std::min(shift, 0.0) + 0.5 * std::max(0.0, g.at(i)) - 10.0;
    }
    for (std::size_t i = 0; i < g.count; ++i) CHECK(w[i] <= p.values()[i]);
  }
}

TEST_CASE("singular tail") {
  const auto s = make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1), 0.2));
  const double t0 = s.grid().t_min;
  // Tail continues the singular profile: u(t) - u(t0) = -eps (g(t) - g(t0)) with slope 0.
  CHECK(s(-1000.0) - s(t0) ==
        doctest::Approx(-0.2 * (loglog_profile(-1000.0) - loglog_profile(t0))).epsilon(1e-12));
  CHECK(s.left_tail_derivative(-100.0) > 0.0);
  CHECK(s.left_tail_slope_at_start() <= (s.values()[1] - s.values()[0]) / s.grid().step() + 1e-12);

  // Floor crossing solves the tail equation.
  auto tail = *s.singular_tail();
  tail.floor = TailFloor{s.values().front() - 1.0, 0.0};
  const ToricWeight tr(1, s.grid(), std::vector<double>(s.values().begin(), s.values().end()),
                       0.0, 1.0, tail);
  const double tc = tr.floor_crossing();
  CHECK(tc < t0);
  CHECK(tr.left_tail_value(tc) == doctest::Approx(s.values().front() - 1.0).epsilon(1e-12));
  CHECK(-0.2 * (loglog_profile(tc) - loglog_profile(t0)) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(!tr.is_singular());

  // g'' by central differences.
  for (double t : {-20.0, -2.0, 0.0, 3.0}) {
    const double h = 1e-4;
    const double fd = (loglog_profile(t + h) - 2 * loglog_profile(t) + loglog_profile(t - h)) / (h * h);
    CHECK(loglog_profile_d2(t) == doctest::Approx(fd).epsilon(1e-5));
    const double fd1 = (loglog_profile(t + h) - loglog_profile(t - h)) / (2 * h);
    CHECK(loglog_profile_d1(t) == doctest::Approx(fd1).epsilon(1e-7));
  }
}

TEST_CASE("weight json round trip is exact") {
  for (const auto& u : {bumped_fs(2, 0.3, 512),
                        make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1, 30, 64), 0.2))}) {
    const auto j = weight_to_json(u);
    const auto v = weight_from_json(nlohmann::json::parse(j.dump()));
    CHECK(std::equal(u.values().begin(), u.values().end(), v.values().begin()));
    CHECK(u.grid() == v.grid());
    CHECK(u.left_slope() == v.left_slope());
    CHECK(u.singular_tail() == v.singular_tail());
  }
  CHECK(parse_double(nlohmann::json("-0x1.8p+1")) == -3.0);
  CHECK(parse_double(nlohmann::json(2.5)) == 2.5);
  CHECK_THROWS_AS(parse_double(nlohmann::json("abc")), DomainError);
}
