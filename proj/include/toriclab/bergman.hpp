#pragma once

// Adjoint sections z^j dz of L^k (x) K on the sphere, j = 0..km-2, and their
// L^2 pairing int |z|^{2j} e^{-2k u(log|z|)} |dz ^ dzbar|. By S^1 symmetry the
// Gram matrix is diagonal; entries are kept as logarithms.

#include <vector>

#include "toriclab/convex.hpp"
#include "toriclab/functionals.hpp"

namespace toriclab {

struct GramDiagonal {
  int k = 0;
  int m = 0;
  std::vector<double> log_entries;  // log G_jj, j = 0..N_k-1

  [[nodiscard]] std::size_t N() const { return log_entries.size(); }
};

/// log G_jj = log(4 pi) + log int e^{(2j+2)t - 2k u(t)} dt: trapezoid rule in
/// log-sum-exp form over the grid, closed-form affine tails, and a numeric
/// extension for singular tails. Throws DomainError on divergence.
GramDiagonal gram_diagonal(const ToricWeight& u, int k);

/// Full Gram matrix from a polar (t, theta) product rule with n_theta angles.
/// Entry (a, b) is returned as real and imaginary parts in row-major order.
/// Used to confirm that off-diagonal entries vanish.
struct GramMatrix2D {
  std::size_t n = 0;
  std::vector<double> re;
  std::vector<double> im;
};
GramMatrix2D gram_full_2d(const ToricWeight& u, int k, std::size_t n_theta = 64);

/// -(1/(k N)) sum_j (log G^a_jj - log G^b_jj).
double l_k_from_grams(const GramDiagonal& a, const GramDiagonal& b);

/// L_k(phi) for the weight u relative to the reference u0.
double l_k(const ToricWeight& u, const ToricWeight& u0, int k);

/// Bergman measure beta_k: density (1/N) sum_j 4 pi e^{(2j+2)t - 2k u - log G_jj}
/// on the grid; the mass of each tail is lumped into one atom at its mean.
Measure1D bergman_density(const ToricWeight& u, int k);

/// max over the grid of beta_k / MA - 1 where MA >= 1e-6. MA is taken from a
/// fourth-order difference of the samples. Refuses weights with atoms.
double morse_ratio(const ToricWeight& u, int k);

/// Gateaux check of L_k at u in direction v (phi units, grid samples) against beta_k.
GateauxReport gateaux_check_lk(const ToricWeight& u, std::span<const double> v, int k,
                               const std::vector<double>& steps = {1e-2, 1e-3});

struct PathValue {
  double s = 0.0;
  double value = 0.0;
};

/// s_i -> L_k(sample(s_i)) relative to the path's start, s_i = i / (samples - 1).
std::vector<PathValue> lk_along_geodesic(const GeodesicPath& path, int k, int samples = 11);

/// Smallest discrete second difference of a sequence (+inf for fewer than 3 values).
double min_second_difference(const std::vector<PathValue>& seq);

/// CSV "k,j,log_G_jj".
std::string gram_csv(const GramDiagonal& g);

}  // namespace toriclab
