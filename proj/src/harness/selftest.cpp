#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "toriclab/harness/run.hpp"
#include "toriclab/kernels.hpp"

namespace toriclab::harness {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double max_beta_error(const ToricWeight& fs, int k) {
  const GramDiagonal g = gram_diagonal(fs, k);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.N(); ++j) {
    const double ref = std::log(2 * std::numbers::pi) + std::lgamma(j + 1.0) + std::lgamma(k - j - 1.0) -
                       std::lgamma(static_cast<double>(k));
    worst = std::max(worst, std::abs(g.log_entries[j] - ref));
  }
  return worst;
}

}  // namespace

SelftestReport selftest(const SelftestOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  SelftestReport rep;
  auto& out = rep.checks;
  auto add = [&](std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
  };
  auto add_all = [&](const std::vector<Check>& cs) { out.insert(out.end(), cs.begin(), cs.end()); };

  const WeightSpec fs_spec = WeightSpec::fubini_study(1, o.T, o.G);
  const ToricWeight fs = make_weight(fs_spec);
  const ToricWeight bump = make_weight(WeightSpec::perturbed(fs_spec, 0.3, 0.5, 1.0));
  const ToricWeight small = make_weight(WeightSpec::perturbed(fs_spec, 0.05, 0.5, 1.0));

  {  // scalar and AVX2 kernels agree
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-40.0, 0.0), t(-30.0, 30.0);
    std::vector<double> base(1000), tt(1000);
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = d(rng), tt[i] = t(rng);
    double diff = 0.0;
    if (kernels::avx2_supported()) {
      const double a = kernels::scalar::sum_exp_affine(base.data(), tt.data(), base.size(), 0.7, 0.0);
      const double b = kernels::avx2::sum_exp_affine(base.data(), tt.data(), base.size(), 0.7, 0.0);
      diff = std::abs(a - b) / std::abs(a);
    }
    add("kernel backends agree", diff <= 1e-13, "relative difference " + sci(diff));
  }
  {  // Legendre biconjugacy
    const ToricWeight back = inverse_legendre(legendre(fs), fs.grid(), 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.values().size(); ++i)
      worst = std::max(worst, std::abs(back.values()[i] - fs.values()[i]));
    add("legendre biconjugate", worst <= 1e-9 * fs.value_scale(), "max difference " + sci(worst));
  }
  {
    const double mass = monge_ampere(bump).total_mass();
    add("Monge-Ampere mass", std::abs(mass - 1.0) <= kTolMass, "mass - 1 = " + sci(mass - 1.0));
    const double ed = energy_direct(bump, fs), el = energy_legendre(bump, fs);
    add("energy implementations agree", std::abs(ed - el) <= kTolEnergy, "|diff| = " + sci(std::abs(ed - el)));
  }
  add_all(geodesic_study(fs, bump, 11, 16).checks);
  {  // L_k^ari differences against L_k
    double worst = 0.0;
    for (int k : {8, 32}) worst = std::max(worst, l_k_ari(bump, fs, k, o.covolume_factor).bridge_residual);
    add("bridge identity", worst <= 1e-10, "max residual " + sci(worst));
  }
  {
    const ToricWeight sh = make_weight(WeightSpec::shifted(fs_spec, 0.3));
    const int k = 16;
    const double expect = k * (k - 1.0) * 0.3 / 2;
    const double got = adeg(sh, k) - adeg(fs, k);
    add("adeg shift law", std::abs(got - expect) <= 1e-10 * expect, "difference " + sci(got - expect));
  }
  {
    const double mass = bergman_density(bump, 16).total_mass();
    add("Bergman mass", std::abs(mass - 1.0) <= 1e-12, "mass - 1 = " + sci(mass - 1.0));
  }
  {  // quadrature robustness: exact Beta integrals and resolution doubling
    const double err = max_beta_error(fs, 32);
    add("FS Gram entries match Beta integrals", err <= 1e-8, "max log error " + sci(err));
    const ToricWeight bump2 = make_weight(WeightSpec::perturbed(WeightSpec::fubini_study(1, o.T, 2 * o.G), 0.3, 0.5, 1.0));
    const ToricWeight fs2 = make_weight(WeightSpec::fubini_study(1, o.T, 2 * o.G));
    const double d = std::abs(l_k(bump, fs, 32) - l_k(bump2, fs2, 32));
    add("L_k stable under grid doubling", d <= 1e-6, "change " + sci(d));
  }
  {
    const auto m = morse_study(small, {8, 16, 32});
    add("delta_k positive on a smooth perturbation", m.checks.front().pass, m.checks.front().detail);
  }
  {
    const auto c = convergence_study(bump, fs, {8, 16, 32}, 0.05);
    add("L_k approaches E", c.rows.back().gap < c.rows.front().gap,
        "gap " + sci(c.rows.front().gap) + " -> " + sci(c.rows.back().gap));
  }
  add_all(gateaux_study(small, fs, 16).checks);
  add_all(lattice_study(1, 100).checks);
  {
    const bool exact = zeta_F_minus1(5) == Rational(1, 30) && zeta_F_minus1(13) == Rational(1, 6);
    add("zeta_F(-1) exact values", exact, zeta_F_minus1(5).str() + ", " + zeta_F_minus1(13).str());
    double worst = 0.0;
    for (std::int64_t D : {5, 13, 17, 29, 37})
      worst = std::max(worst, std::abs(zeta_F_minus1(D).to_double() - zeta_F_numeric(D)));
    add("Siegel sum matches analytic value", worst <= 1e-9, "max difference " + sci(worst));
    const bool index = congruence_index(5, 2) == 60 && congruence_index(13, 3) == 576 &&
                       congruence_index(5, 12) == congruence_index(5, 3) * congruence_index(5, 4);
    add("congruence index", index, std::to_string(congruence_index(5, 2)));
  }
  add_all(hilbert_study({5}, {9, 12, 20}).checks);

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  add("selftest under 60 s", rep.seconds < 60.0, std::to_string(rep.seconds) + " s");
  return rep;
}

}  // namespace toriclab::harness
