#include "toriclab/harness/studies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "toriclab/parallel.hpp"

namespace toriclab::harness {

namespace {

Check make_check(std::string name, bool pass, const char* format, double a, double b = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, format, a, b);
  return {std::move(name), pass, buf};
}

}  // namespace

const Check* first_failure(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return &c;
  return nullptr;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double energy_of(const ToricWeight& u, const ToricWeight& u0) {
  if (u.has_minimal_singularities()) return energy_direct(u, u0);
  const SingularEnergy e = energy_singular(u, u0);
  if (!e.finite) throw ContractError("energy_singular did not converge: " + e.message);
  return e.value;
}

ConvergenceStudy convergence_study(const ToricWeight& u, const ToricWeight& u0, const std::vector<int>& k_list,
                                   double gap_factor) {
  if (k_list.empty()) throw DomainError("convergence_study: empty k schedule");
  ConvergenceStudy s;
  s.energy_direct = energy_direct(u, u0);
  s.energy_legendre = energy_legendre(u, u0);
  const double E = s.energy_direct;
  s.rows.resize(k_list.size());
  parallel_for(k_list.size(), [&](std::size_t i) {
    const double lk = l_k(u, u0, k_list[i]);
    s.rows[i] = {k_list[i], lk, std::abs(lk - E)};
  });

  const double dE = std::abs(s.energy_direct - s.energy_legendre);
  s.checks.push_back(make_check("energy_direct matches energy_legendre", dE <= kTolEnergy, "|diff| = %.3e", dE));
  // Eventually monotone: non-increasing from the largest index where it
  // increased, over at least the second half of the schedule.
  std::size_t start = 0;
  for (std::size_t i = 1; i < s.rows.size(); ++i)
    if (s.rows[i].gap > s.rows[i - 1].gap) start = i;
  const bool monotone = start <= s.rows.size() / 2;
  s.checks.push_back(make_check("gap eventually monotone decreasing", monotone,
                                "monotone from schedule index %.0f of %.0f", double(start), double(s.rows.size())));
  const double last = s.rows.back().gap, bound = gap_factor * (1.0 + std::abs(E));
  s.checks.push_back(make_check("final gap below threshold", last <= bound, "gap %.3e <= %.3e", last, bound));
  return s;
}

GeodesicStudy geodesic_study(const ToricWeight& u0, const ToricWeight& u1, int samples, int k) {
  if (samples < 3) throw DomainError("geodesic_study: need at least three samples");
  const GeodesicPath path = geodesic(u0, u1);
  GeodesicStudy s;
  s.rows.resize(samples);
  const double E1 = energy_direct(u1, u0);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    const double t = static_cast<double>(i) / (samples - 1);
    const ToricWeight w = path.sample(t);
    s.rows[i] = {t, energy_direct(w, u0), t * E1, 0.0};
  });
  for (const auto& r : s.rows) s.max_chord_deviation = std::max(s.max_chord_deviation, std::abs(r.energy - r.chord));
  const auto lk = lk_along_geodesic(path, k, samples);
  for (int i = 0; i < samples; ++i) {
    s.rows[i].lk = lk[i].value;
    s.lk_scale = std::max(s.lk_scale, std::abs(lk[i].value));
  }
  s.lk_min_second_difference = min_second_difference(lk);
  const double pairing = monge_ampere(u0).integrate_samples(path.initial_velocity());
  s.velocity_slack = pairing - E1;

  const double tol_aff = 1e-4 * (1.0 + std::abs(E1));
  s.checks.push_back(make_check("energy affine along geodesic", s.max_chord_deviation <= tol_aff,
                                "max |E - chord| = %.3e <= %.3e", s.max_chord_deviation, tol_aff));
  s.checks.push_back(make_check("initial velocity bounds energy difference", s.velocity_slack >= -1e-6,
                                "slack %.3e", s.velocity_slack));
  const double tol_cvx = -1e-8 * std::max(1.0, s.lk_scale);
  s.checks.push_back(make_check("L_k convex along geodesic", s.lk_min_second_difference >= tol_cvx,
                                "min second difference %.3e >= %.3e", s.lk_min_second_difference, tol_cvx));
  return s;
}

MorseStudy morse_study(const ToricWeight& u, const std::vector<int>& k_list) {
  if (k_list.size() < 2) throw DomainError("morse_study: need at least two k values");
  MorseStudy s;
  s.rows.resize(k_list.size());
  parallel_for(k_list.size(), [&](std::size_t i) { s.rows[i] = {k_list[i], morse_ratio(u, k_list[i])}; });
  double min_delta = INFINITY;
  for (const auto& r : s.rows) min_delta = std::min(min_delta, r.delta);
  s.checks.push_back(make_check("delta_k positive", min_delta > 0, "min delta %.3e", min_delta));
  const auto ref = std::find_if(s.rows.begin(), s.rows.end(), [](const MorseRow& r) { return r.k == 16; });
  const MorseRow& base = ref != s.rows.end() ? *ref : s.rows.front();
  const MorseRow& last = s.rows.back();
  char name[96];
  std::snprintf(name, sizeof name, "delta_%d below half of delta_%d", last.k, base.k);
  s.checks.push_back(make_check(name, last.delta < 0.5 * base.delta, "%.6e vs %.6e", last.delta, base.delta));
  return s;
}

GateauxStudy gateaux_study(const ToricWeight& u, const ToricWeight& u0, int k, double min_order) {
  std::vector<double> v(u.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double t = u.grid().at(i);
    v[i] = std::exp(-t * t);
  }
  GateauxStudy s;
  s.energy = gateaux_check_energy(u, u0, v);
  s.lk = gateaux_check_lk(u, v, k);
  s.checks.push_back(make_check("Gateaux order E / MA", s.energy.order >= min_order, "order %.3f (min %.2f)",
                                s.energy.order, min_order));
  s.checks.push_back(make_check("Gateaux order L_k / beta_k", s.lk.order >= min_order, "order %.3f (min %.2f)",
                                s.lk.order, min_order));
  return s;
}

AdegStudy adeg_study(const ToricWeight& u, const ToricWeight& u0, const std::vector<int>& k_list, double rel_tol) {
  AdegStudy s;
  s.difference = height_slope_difference(u, u0, k_list);
  s.bridge_residuals.resize(k_list.size());
  parallel_for(k_list.size(),
               [&](std::size_t i) { s.bridge_residuals[i] = l_k_ari(u, u0, k_list[i]).bridge_residual; });
  s.energy = energy_of(u, u0);
  const double target = u.degree() * s.energy;
  s.relative_error = std::abs(s.difference.extrapolated_slope - target) / std::max(std::abs(target), 1e-300);
  const double worst = *std::max_element(s.bridge_residuals.begin(), s.bridge_residuals.end());
  s.checks.push_back(make_check("bridge identity", worst <= 1e-10, "max residual %.3e", worst));
  s.checks.push_back(make_check("slope difference matches m E", s.relative_error <= rel_tol,
                                "relative error %.3e <= %.3e", s.relative_error, rel_tol));
  s.checks.push_back(make_check("height fit well conditioned", !s.difference.ill_conditioned, "condition %.3e",
                                s.difference.condition));
  return s;
}

LatticeStudy lattice_study(std::uint64_t seed, int trials) {
  LatticeStudy s;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> gen(-3, 3), sub(-2, 2);
  std::uniform_real_distribution<double> logscale(-2.0, 2.0);
  s.min_margin = INFINITY;
  auto record = [&](const MinimaCheck& c) {
    ++s.trials;
    s.held += c.holds ? 1 : 0;
    s.min_margin = std::min(s.min_margin, c.lhs - c.rhs);
  };
  Eigen::MatrixXi axis(2, 1);
  axis << 1, 0;
  const MinimaCheck tight = minima_inequality_check(Eigen::MatrixXd::Identity(2, 2), axis);
  s.checks.push_back(make_check("tight orthonormal case", tight.holds && std::abs(tight.lhs - tight.rhs) < 1e-14,
                                "lhs %.3e rhs %.3e", tight.lhs, tight.rhs));
  for (int trial = 0; trial < trials; ++trial) {
    const int d = 2 + trial % 3;
    const int dp = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    Eigen::MatrixXd B(d, d);
    do {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) B(i, j) = gen(rng);
    } while (std::abs(B.determinant()) < 0.5);
    const Eigen::MatrixXd Q = std::exp(logscale(rng)) * (B.transpose() * B);
    Eigen::MatrixXi S(d, dp);
    while (true) {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < dp; ++j) S(i, j) = sub(rng);
      if (Eigen::FullPivLU<Eigen::MatrixXd>(S.cast<double>()).rank() == dp) break;
    }
    record(minima_inequality_check(Q, S));
  }
  s.checks.push_back(make_check("minima inequality on random pairs", s.held == s.trials,
                                "%.0f of %.0f hold", double(s.held), double(s.trials)));
  return s;
}

HilbertStudy hilbert_study(const std::vector<std::int64_t>& Ds, const std::vector<std::int64_t>& ells) {
  HilbertStudy s;
  for (auto D : Ds) {
    double per_d = NAN;
    bool independent = true;
    for (auto ell : ells) {
      HilbertConstant h = hilbert_slope(D, ell);
      const double assembled = -static_cast<double>(h.d_ell) * h.zeta_F_m1.to_double() * h.bracket;
      if (std::abs(h.slope - assembled) > 1e-12 * std::abs(assembled)) independent = false;
      const double ratio = h.slope / static_cast<double>(h.d_ell);
      if (std::isnan(per_d)) per_d = ratio;
      else if (std::abs(ratio - per_d) > 1e-12 * std::abs(per_d)) independent = false;
      s.records.push_back(std::move(h));
    }
    char name[64];
    std::snprintf(name, sizeof name, "D = %lld: slope / d_ell independent of ell", static_cast<long long>(D));
    s.checks.push_back(make_check(name, independent, "slope / d_ell = %.12g", per_d));
  }
  return s;
}

std::string convergence_csv(const ConvergenceStudy& s) {
  std::string out = "k,L_k,energy,gap\n";
  for (const auto& r : s.rows)
    out += std::to_string(r.k) + "," + fmt(r.lk) + "," + fmt(s.energy_direct) + "," + fmt(r.gap) + "\n";
  return out;
}

std::string geodesic_csv(const GeodesicStudy& s) {
  std::string out = "s,energy,chord,L_k\n";
  for (const auto& r : s.rows) out += fmt(r.s) + "," + fmt(r.energy) + "," + fmt(r.chord) + "," + fmt(r.lk) + "\n";
  return out;
}

std::string morse_csv(const MorseStudy& s) {
  std::string out = "k,delta\n";
  for (const auto& r : s.rows) out += std::to_string(r.k) + "," + fmt(r.delta) + "\n";
  return out;
}

std::string hilbert_csv(const HilbertStudy& s) {
  std::string out = "D,ell,d_ell,zeta_F_m1,zeta_F_prime_m1,bracket,slope,k3_coefficient\n";
  for (const auto& h : s.records)
    out += std::to_string(h.D) + "," + std::to_string(h.ell) + "," + std::to_string(h.d_ell) + "," +
           h.zeta_F_m1.str() + "," + fmt(h.zeta_F_prime_m1) + "," + fmt(h.bracket) + "," + fmt(h.slope) + "," +
           fmt(h.k3_coefficient) + "\n";
  return out;
}

}  // namespace toriclab::harness
