#pragma once

// Lattices of integral sections and their arithmetic degrees. The model is
// P^1 over Z with L = O(m) and the monomial differentials z^j dz as integral
// basis, orthogonal for every S^1-invariant weight.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toriclab/bergman.hpp"

namespace toriclab {

/// -log covol of an orthogonal lattice: -(1/2) sum_j log G_jj.
double adeg(const GramDiagonal& g);
double adeg(const ToricWeight& u, int k);
/// Orthogonal lattice given by the norms of its basis vectors.
double adeg_from_norms(const std::vector<double>& norms);

struct LkAri {
  double value = 0.0;            // (factor / (k N)) adeg(u, k)
  double reference = 0.0;        // same for u0
  double lk = 0.0;               // L_k(phi) from the same Gram data
  double bridge_residual = 0.0;  // |(value - reference) - lk|
};

/// Arithmetic L_k with the covolume normalisation factor (2 in the
/// definition; exposed so a mutation test can break it).
LkAri l_k_ari(const ToricWeight& u, const ToricWeight& u0, int k, double factor = 2.0);

struct HeightEstimate {
  std::vector<int> k_list;
  std::vector<double> adeg_list;
  std::vector<double> coefficients;  // on k^2/2, k log k, k, log k, 1 (leading ones)
  double extrapolated_slope = 0.0;   // coefficient of k^2/2
  int extrapolation_order = 0;       // number of fitted terms
  std::vector<double> residuals;
  double condition = 0.0;            // of the scaled design matrix
  bool ill_conditioned = false;
};

/// Least-squares fit of adeg(k) = h k^2/2 + b k log k + c k + d log k + e.
HeightEstimate fit_height(const std::vector<int>& k_list, const std::vector<double>& values);

/// Fit of adeg(u, k) over k_list (increasing, >= 4 values, max k >= 128).
HeightEstimate height_slope(const ToricWeight& u, const std::vector<int>& k_list);

/// Fit of adeg(u, k) - adeg(u0, k); its slope estimates m E(phi).
HeightEstimate height_slope_difference(const ToricWeight& u, const ToricWeight& u0,
                                       const std::vector<int>& k_list);

/// lambda_d of the lattice Z^d with Gram matrix Q (rank d <= 6): the least r
/// such that the vectors of norm <= r span a rank-d sublattice.
double lambda_d(const Eigen::MatrixXd& Q);

/// All nonzero integer vectors c with c^T Q c <= r2 (Fincke-Pohst).
std::vector<std::vector<std::int64_t>> short_vectors(const Eigen::MatrixXd& Q, double r2);

struct MinimaCheck {
  double adeg_M = 0.0;
  double adeg_Mprime = 0.0;
  double lambda = 0.0;
  double lhs = 0.0;  // adeg(M) - adeg(M')
  double rhs = 0.0;  // -log d! - (d - d') log(lambda_d(M) / 2)
  bool holds = false;
};

/// M = Z^d with Gram Q, M' spanned by the integer columns of S (d x d').
MinimaCheck minima_inequality_check(const Eigen::MatrixXd& Q, const Eigen::MatrixXi& S);

/// CSV "k,adeg,2adeg_over_k2,fitted_h,residual".
std::string height_csv(const HeightEstimate& h);

}  // namespace toriclab
