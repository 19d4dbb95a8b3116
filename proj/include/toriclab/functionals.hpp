#pragma once

// Monge-Ampere measures, the Aubin-Mabuchi energy and geodesics in the
// toric picture. Energies are reported in phi units (phi = 2 (u - u0)).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "toriclab/convex.hpp"

namespace toriclab {

inline constexpr double kTolMass = 1e-8;
inline constexpr double kTolEnergy = 1e-5;
inline constexpr double kTolHmae = 1e-4;

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Measure on the t-line: a density on a uniform grid (trapezoid rule) plus atoms.
struct Measure1D {
  UniformGrid grid;
  std::vector<double> density;
  std::vector<Atom> atoms;

  [[nodiscard]] double density_mass() const;
  [[nodiscard]] double total_mass() const;
  /// Integral of f: trapezoid rule on the density plus f at the atoms.
  [[nodiscard]] double integrate(const std::function<double(double)>& f) const;
  /// Same, with f given by its grid samples (atoms off the grid use linear interpolation).
  [[nodiscard]] double integrate_samples(std::span<const double> f) const;
};

/// Normalized MA(phi): density u''/m, atoms at slope jumps, plus the measure
/// carried by a singular left tail.
Measure1D monge_ampere(const ToricWeight& u);

/// Kink detection threshold: a vertex mass larger than this multiple of both
/// neighbours (and above kAtomFloor) becomes an atom.
inline constexpr double kAtomRatio = 50.0;
inline constexpr double kAtomFloor = 1e-6;

/// E(phi) from the intrinsic formula (1/(2m)) int phi (dmu_u + dmu_u0).
/// u may carry a truncated (floored) singular tail; u0 must have plain tails.
double energy_direct(const ToricWeight& u, const ToricWeight& u0);

/// E(phi) = (2/m) int_0^m (u0* - u*) dx. Both weights need minimal singularities.
double energy_legendre(const ToricWeight& u, const ToricWeight& u0);

struct SingularEnergy {
  double value = 0.0;
  std::vector<double> levels;  // truncation levels j
  std::vector<double> trace;   // E(max(phi, -j))
  bool finite = false;
  bool monotone = true;
  double contraction = 0.0;  // last ratio of successive differences
  std::string message;
};

/// E of the truncations max(phi, -j), re-convexified, and a geometric
/// extrapolation of the limit.
SingularEnergy energy_singular(const ToricWeight& u_sing, const ToricWeight& u0,
                               const std::vector<double>& schedule = {1, 2, 3, 4, 5, 6, 7, 8});

/// Truncation used by energy_singular: psh_project(max(u, u0 - j/2)).
ToricWeight truncate_weight(const ToricWeight& u, const ToricWeight& u0, double j);

class GeodesicPath {
 public:
  enum class Kind { Geodesic, BarrierSubgeodesic };

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const ToricWeight& start() const { return u0_; }
  [[nodiscard]] const ToricWeight& end() const { return u1_; }
  [[nodiscard]] double barrier_constant() const { return C_; }
  [[nodiscard]] bool is_constant() const { return constant_; }
  [[nodiscard]] const std::string& warning() const { return warning_; }

  [[nodiscard]] ToricWeight sample(double s) const;

  /// d/ds phi_s at s = 0+, in phi units, at the grid points. Exact for
  /// geodesics (envelope formula on the conjugates); a one-sided difference
  /// with step h otherwise.
  [[nodiscard]] std::vector<double> initial_velocity(double h = 1e-6) const;

 private:
  friend GeodesicPath geodesic(const ToricWeight&, const ToricWeight&);
  friend GeodesicPath barrier_subgeodesic(const ToricWeight&, const ToricWeight&, double);
  GeodesicPath(ToricWeight u0, ToricWeight u1) : u0_(std::move(u0)), u1_(std::move(u1)) {}

  ToricWeight u0_;
  ToricWeight u1_;
  Kind kind_ = Kind::Geodesic;
  double C_ = 0.0;
  bool constant_ = false;
  std::string warning_;
  std::vector<double> knots_;  // merged conjugate knots
  std::vector<double> dual0_;
  std::vector<double> dual1_;
};

GeodesicPath geodesic(const ToricWeight& u0, const ToricWeight& u1);

/// s -> psh_project(max(u0 - (C/2) s, u1 + (C/2)(s - 1))). Sets a warning
/// when C < 2 sup|u1 - u0| (endpoints are then not matched).
GeodesicPath barrier_subgeodesic(const ToricWeight& u0, const ToricWeight& u1, double C);

struct HmaeGrid {
  std::size_t ns = 21;
  /// t-nodes are grid vertices of the path's weights spaced by the multiple
  /// of the grid step closest to t_step, restricted to [t_min, t_max].
  double t_step = 0.03;
  double t_min = -6.0;
  double t_max = 6.0;
};

/// max over interior nodes of |det Hess U| / (1 + |Hess U|), U(s,t) = sample(s)(t),
/// with centered differences. The residual is only meaningful where U is C^2:
/// PL round-off of the grid representation enters as O(h_grid^2 / h^2), so
/// smooth paths need a fine weight grid (G ~ 2^16) to reach kTolHmae.
double check_homogeneous_ma(const GeodesicPath& path, const HmaeGrid& grid = {});

struct GateauxReport {
  std::vector<double> steps;
  std::vector<double> quotients;
  std::vector<double> residuals;
  double pairing = 0.0;
  double order = 0.0;
};

/// (F(u + (tau/2) v) - F(u)) / tau against int v dmu, for a functional F and
/// a direction v in phi units given on the grid of u. Perturbations are
/// passed through psh_project.
GateauxReport gateaux_check(const std::function<double(const ToricWeight&)>& F,
                            const ToricWeight& u, std::span<const double> v,
                            const Measure1D& derivative, const std::vector<double>& steps);

/// Gateaux check of E at u in direction v against MA(u).
GateauxReport gateaux_check_energy(const ToricWeight& u, const ToricWeight& u0,
                                   std::span<const double> v,
                                   const std::vector<double>& steps = {1e-2, 1e-3});

/// CSV: "t,density,atom_mass" rows (grid rows then atom rows).
std::string measure_csv(const Measure1D& mu);

}  // namespace toriclab
