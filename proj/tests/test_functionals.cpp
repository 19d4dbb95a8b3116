#include "doctest.h"
#include "toriclab/functionals.hpp"

#include <algorithm>
#include <cmath>

using namespace toriclab;

namespace {

double fs_u(double t) { return 0.5 * std::log1p(std::exp(2 * t)); }
double fs_d1(double t) { return 1.0 / (1.0 + std::exp(-2 * t)); }
double fs_d2(double t) {
  const double e = std::exp(-2 * std::abs(t));
  return 2 * e / ((1 + e) * (1 + e));
}

WeightSpec fs_spec(std::size_t G = 4096) { return WeightSpec::fubini_study(1, 30.0, G); }

ToricWeight bump(double amp, std::size_t G = 4096) {
  return make_weight(WeightSpec::perturbed(fs_spec(G), amp, 0.5, 1.0));
}

template <class F>
double simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

// E(LogSingular(FS, eps)) relative to FS, from the continuum formula
// (1/2) int phi (u'' + u0'') dt. The psh projection of FS - eps g replaces it
// by a slope-1 line beyond the first point t_c where its slope reaches 1.
double singular_energy_oracle(double eps) {
  auto f = [&](double t) { return fs_u(t) - eps * loglog_profile(t); };
  auto fp = [&](double t) { return fs_d1(t) - eps * loglog_profile_d1(t); };
  double lo = 0.0, hi = 10.0;  // fp(0) < 1 < fp(10)
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fp(mid) < 1.0 ? lo : hi) = mid;
  }
  const double tc = 0.5 * (lo + hi);
  auto integrand = [&](double t) {
    const double u = t <= tc ? f(t) : f(tc) + (t - tc);
    const double upp = t <= tc ? fs_d2(t) - eps * loglog_profile_d2(t) : 0.0;
    return (u - fs_u(t)) * (upp + fs_d2(t));
  };
  // t = sinh(v) turns the 1/t^2 decay of the left tail into exponential decay.
  auto in_v = [&](double v) { return integrand(std::sinh(v)) * std::cosh(v); };
  const double vc = std::asinh(tc);
  return simpson(in_v, -60.0, vc, 400000) + simpson(in_v, vc, 6.0, 20000);
}

}  // namespace

TEST_CASE("monge_ampere examples") {
  const auto ml = monge_ampere(make_weight(WeightSpec::max_linear(1)));
  REQUIRE(ml.atoms.size() == 1);
  CHECK(ml.atoms[0].location == 0.0);
  CHECK(ml.atoms[0].mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ml.density_mass() == doctest::Approx(0.0));

  const auto fs = make_weight(WeightSpec::fubini_study(1));
  const auto mu = monge_ampere(fs);
  CHECK(mu.atoms.empty());
  const std::size_t mid = fs.grid().count / 2;
  CHECK(fs.grid().at(mid) == 0.0);
  CHECK(mu.density[mid] == doctest::Approx(0.5).epsilon(1e-4));
  for (double t : {-3.0, -1.0, 0.5, 2.0}) {
    const std::size_t i = static_cast<std::size_t>(std::lround((t + 30.0) / fs.grid().step()));
    const double ti = fs.grid().at(i), h = 1e-4;
    const double fd = (fs_u(ti + h) - 2 * fs_u(ti) + fs_u(ti - h)) / (h * h);
    CHECK(mu.density[i] == doctest::Approx(fd).epsilon(1e-4));
  }
  CHECK(std::abs(mu.total_mass() - 1.0) <= kTolMass);
}

TEST_CASE("finite-energy weights carry full Monge-Ampere mass") {
  const auto fs = make_weight(fs_spec());
  const auto sing = make_weight(WeightSpec::log_singular(fs_spec(), 0.2));
  for (const auto& u : {fs, bump(0.3), bump(1.0), make_weight(WeightSpec::max_linear(3)), sing,
                        truncate_weight(sing, fs, 3.0), truncate_weight(sing, fs, 8.0)}) {
    CHECK(std::abs(monge_ampere(u).total_mass() - 1.0) <= kTolMass);
  }
}

TEST_CASE("energy examples") {
  const auto u0 = make_weight(fs_spec());
  CHECK(energy_direct(u0, u0) == 0.0);
  CHECK(energy_legendre(u0, u0) == 0.0);
  CHECK(energy_direct(u0.shifted(1.0), u0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(energy_legendre(u0.shifted(1.0), u0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(energy_legendre(u0.shifted(-0.37), u0) == doctest::Approx(-0.37).epsilon(1e-13));

  for (double amp : {0.05, 0.3, 1.0}) {
    const auto u = bump(amp);
    CHECK(std::abs(energy_direct(u, u0) - energy_legendre(u, u0)) <= kTolEnergy);
  }
  // MaxLinear against FS: 2 int_0^1 u0*(x) dx = int (x log x + (1-x) log(1-x)) = -1/2.
  const auto ml = make_weight(WeightSpec::max_linear(1));
  const double ed = energy_direct(ml, u0), el = energy_legendre(ml, u0);
  CHECK(std::abs(ed - el) <= kTolEnergy);
  CHECK(ed == doctest::Approx(-0.5).epsilon(1e-4));

  CHECK_THROWS_AS(energy_direct(make_weight(WeightSpec::fubini_study(2)), u0), DomainError);
  CHECK_THROWS_AS(energy_direct(make_weight(WeightSpec::log_singular(fs_spec(), 0.2)), u0), DomainError);
  CHECK_THROWS_AS(energy_legendre(make_weight(WeightSpec::log_singular(fs_spec(), 0.2)), u0), DomainError);
}

TEST_CASE("energy is monotone and concave along affine paths") {
  const auto u0 = make_weight(fs_spec());
  double prev = -1.0;
  for (double amp : {0.0, 0.1, 0.3, 0.6, 1.0}) {
    const double e = energy_direct(bump(amp), u0);
    CHECK(e >= prev);
    prev = e;
  }
  const auto a = make_weight(WeightSpec::max_linear(1));
  const auto b = bump(0.8);
  std::vector<double> E;
  for (int i = 0; i <= 10; ++i) {
    const double s = i / 10.0;
    std::vector<double> v(a.values().size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = (1 - s) * a.values()[j] + s * b.values()[j];
    E.push_back(energy_direct(ToricWeight(1, a.grid(), v, 0.0, 1.0), u0));
  }
  for (int i = 1; i < 10; ++i) CHECK(E[i + 1] - 2 * E[i] + E[i - 1] <= 1e-6);
}

TEST_CASE("energy_singular") {
  const auto u0 = make_weight(fs_spec());

  const auto plain = make_weight(WeightSpec::log_singular(WeightSpec::perturbed(fs_spec(), 0.3, 0.5, 1.0), 0.0));
  const auto r0 = energy_singular(plain, u0);
  CHECK(r0.finite);
  for (double e : r0.trace) CHECK(e == r0.trace.front());
  CHECK(r0.value == doctest::Approx(energy_direct(plain, u0)).epsilon(1e-14));

  for (double eps : {0.05, 0.2, 0.5}) {
    const auto s = make_weight(WeightSpec::log_singular(fs_spec(), eps));
    // Crossings sit near t = -exp(j / (2 eps)); larger eps needs more levels.
    std::vector<double> levels;
    for (int j = 1; j <= (eps > 0.3 ? 16 : 8); ++j) levels.push_back(j);
    const auto r = energy_singular(s, u0, levels);
    CHECK(r.monotone);
    CHECK(r.trace[1] < r.trace[0]);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1] + 1e-15);
    CHECK(r.finite);
    CHECK(r.contraction < 0.9);
    CHECK(r.value == doctest::Approx(singular_energy_oracle(eps)).epsilon(2e-4));
  }

  // Levels too close together: no contraction, flagged rather than extrapolated.
  const auto s = make_weight(WeightSpec::log_singular(fs_spec(), 0.2));
  const auto bad = energy_singular(s, u0, {1.0, 1.001, 1.002});
  CHECK(!bad.finite);
  CHECK(bad.message.find("-inf") != std::string::npos);
  CHECK_THROWS_AS(energy_singular(s, u0, {2.0, 1.0}), DomainError);
}

TEST_CASE("geodesic examples") {
  const auto u0 = make_weight(fs_spec());
  const double c = 0.8;
  const auto p = geodesic(u0, u0.shifted(c));
  for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const auto w = p.sample(s);
    const auto ref = u0.shifted(s * c);
    for (std::size_t i = 0; i < w.values().size(); ++i)
      CHECK(std::abs(w.values()[i] - ref.values()[i]) <= 1e-12);
  }
  CHECK(check_homogeneous_ma(p) <= 1e-6);

  const auto u1 = bump(0.3);
  const auto g = geodesic(u0, u1);
  const auto s0 = g.sample(0.0);
  CHECK(std::equal(s0.values().begin(), s0.values().end(), u0.values().begin()));

  const double E1 = energy_direct(u1, u0);
  const double Eh = energy_direct(g.sample(0.5), u0);
  CHECK(std::abs(Eh - 0.5 * E1) <= kTolEnergy);
  double dev = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double s = i / 10.0;
    dev = std::max(dev, std::abs(energy_direct(g.sample(s), u0) - s * E1));
  }
  CHECK(dev <= 1e-4 * (1 + std::abs(E1)));

  // E(phi1) - E(phi0) <= int phi_dot dMA(phi0).
  const double pairing = monge_ampere(u0).integrate_samples(g.initial_velocity());
  CHECK(E1 - 0.0 <= pairing + 1e-6);
  // Velocity agrees with a one-sided difference quotient.
  const auto v = g.initial_velocity();
  const auto sh = g.sample(1e-6);
  for (std::size_t i = 0; i < v.size(); i += 97)
    CHECK(2.0 * (sh.values()[i] - u0.values()[i]) / 1e-6 == doctest::Approx(v[i]).epsilon(1e-4).scale(1.0));

  CHECK_THROWS_AS(geodesic(u0, make_weight(WeightSpec::fubini_study(2))), DomainError);
  CHECK(geodesic(u0, u0).is_constant());
}

TEST_CASE("geodesics solve the homogeneous Monge-Ampere equation") {
  const std::size_t G = 1 << 16;
  const auto u0 = make_weight(fs_spec(G));
  const auto p = geodesic(u0, bump(0.05, G));
  const double r = check_homogeneous_ma(p);
  CHECK(r <= kTolHmae);
  HmaeGrid finer;
  finer.ns = 41;
  finer.t_step = 0.015;
  CHECK(check_homogeneous_ma(p, finer) <= kTolHmae);

  const auto b = barrier_subgeodesic(u0, bump(0.3, G), 1.0);
  CHECK(check_homogeneous_ma(b) > 100 * kTolHmae);
}

TEST_CASE("barrier subgeodesic") {
  const auto u0 = make_weight(fs_spec());
  const auto u1 = bump(0.3);
  double sup = 0.0;
  for (std::size_t i = 0; i < u0.values().size(); ++i) sup = std::max(sup, std::abs(u1.values()[i] - u0.values()[i]));
  const auto p = barrier_subgeodesic(u0, u1, 2 * sup + 0.1);
  CHECK(p.warning().empty());
  const auto a = p.sample(0.0);
  const auto b = p.sample(1.0);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(std::abs(a.values()[i] - u0.values()[i]) <= kTolFenchel);
    CHECK(std::abs(b.values()[i] - u1.values()[i]) <= kTolFenchel);
  }
  std::vector<double> E;
  for (int i = 0; i <= 20; ++i) E.push_back(energy_direct(p.sample(i / 20.0), u0));
  for (int i = 1; i < 20; ++i) CHECK(E[i + 1] - 2 * E[i] + E[i - 1] >= -1e-6);

  // Right derivative of E at 0+ is at most int phi_dot dMA(phi0).
  const double h = 1e-4;
  const double dE = (energy_direct(p.sample(h), u0) - E[0]) / h;
  const double pairing = monge_ampere(u0).integrate_samples(p.initial_velocity(h));
  CHECK(dE <= pairing + 1e-6);

  CHECK(!barrier_subgeodesic(u0, u1, 0.5 * sup).warning().empty());
}

TEST_CASE("Gateaux derivative of the energy") {
  const auto u0 = make_weight(fs_spec());
  const auto u = bump(0.3);
  std::vector<double> v(u.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = u.grid().at(i);
    v[i] = std::exp(-t * t);
  }
  const auto r = gateaux_check_energy(u, u0, v);
  CHECK(r.residuals[1] < r.residuals[0]);
  CHECK(r.order >= 0.9);

  std::vector<double> one(v.size(), 1.0);
  const auto c = gateaux_check_energy(u, u0, one);
  CHECK(c.pairing == doctest::Approx(1.0).epsilon(1e-10));
  for (double res : c.residuals) CHECK(res <= 1e-10);
}

TEST_CASE("measure csv") {
  const auto mu = monge_ampere(make_weight(WeightSpec::max_linear(1, 30.0, 16)));
  const auto csv = measure_csv(mu);
  CHECK(csv.rfind("t,density,atom_mass\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 17 + 1);
}
