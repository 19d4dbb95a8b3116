#pragma once

// Experiment building blocks shared by the lab CLI, the selftest and the
// acceptance binary. Each study returns its table and a list of named checks.

#include <cstdint>
#include <string>
#include <vector>

#include "toriclab/arakelov.hpp"
#include "toriclab/bergman.hpp"
#include "toriclab/functionals.hpp"
#include "toriclab/zeta_hilbert.hpp"

namespace toriclab::harness {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// First failing check, or nullptr.
const Check* first_failure(const std::vector<Check>& checks);

/// Energy of u relative to u0: energy_direct for minimal singularities,
/// energy_singular otherwise.
double energy_of(const ToricWeight& u, const ToricWeight& u0);

struct ConvergenceRow {
  int k = 0;
  double lk = 0.0;
  double gap = 0.0;  // |L_k - E|
};
struct ConvergenceStudy {
  double energy_direct = 0.0;
  double energy_legendre = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<Check> checks;
};
/// gap_factor: the final gap must be below gap_factor (1 + |E|).
ConvergenceStudy convergence_study(const ToricWeight& u, const ToricWeight& u0, const std::vector<int>& k_list,
                                   double gap_factor = 0.05);

struct GeodesicRow {
  double s = 0.0;
  double energy = 0.0;
  double chord = 0.0;
  double lk = 0.0;
};
struct GeodesicStudy {
  std::vector<GeodesicRow> rows;
  double max_chord_deviation = 0.0;
  double velocity_slack = 0.0;  // pairing - (E(u1) - E(u0)) for the initial velocity
  double lk_min_second_difference = 0.0;
  double lk_scale = 0.0;
  std::vector<Check> checks;
};
GeodesicStudy geodesic_study(const ToricWeight& u0, const ToricWeight& u1, int samples = 11, int k = 32);

struct MorseRow {
  int k = 0;
  double delta = 0.0;
};
struct MorseStudy {
  std::vector<MorseRow> rows;
  std::vector<Check> checks;
};
/// delta_k > 0 for all k and delta at the last k below half of delta at k = 16
/// (or at the first k when 16 is absent).
MorseStudy morse_study(const ToricWeight& u, const std::vector<int>& k_list);

struct GateauxStudy {
  GateauxReport energy;
  GateauxReport lk;
  std::vector<Check> checks;
};
/// Direction v = exp(-t^2) at u for both E/MA and L_k/beta_k.
GateauxStudy gateaux_study(const ToricWeight& u, const ToricWeight& u0, int k = 16, double min_order = 0.9);

struct AdegStudy {
  HeightEstimate difference;
  std::vector<double> bridge_residuals;  // per k
  double energy = 0.0;
  double relative_error = 0.0;  // |h - m E| / |m E|
  std::vector<Check> checks;
};
AdegStudy adeg_study(const ToricWeight& u, const ToricWeight& u0, const std::vector<int>& k_list,
                     double rel_tol = 0.02);

struct LatticeStudy {
  int trials = 0;
  int held = 0;
  double min_margin = 0.0;  // min of lhs - rhs
  std::vector<Check> checks;
};
/// Random pairs M' in M of rank 2..4 from a seeded generator, plus the tight
/// orthonormal case.
LatticeStudy lattice_study(std::uint64_t seed, int trials = 1000);

struct HilbertStudy {
  std::vector<HilbertConstant> records;
  std::vector<Check> checks;
};
HilbertStudy hilbert_study(const std::vector<std::int64_t>& Ds, const std::vector<std::int64_t>& ells);

/// Number formatting shared by all CSV writers.
std::string fmt(double x);

std::string convergence_csv(const ConvergenceStudy& s);
std::string geodesic_csv(const GeodesicStudy& s);
std::string morse_csv(const MorseStudy& s);
std::string hilbert_csv(const HilbertStudy& s);

}  // namespace toriclab::harness
