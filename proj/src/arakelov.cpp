#include "toriclab/arakelov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "toriclab/parallel.hpp"

namespace toriclab {

double adeg(const GramDiagonal& g) {
  double s = 0.0;
  for (double x : g.log_entries) s += x;
  return -0.5 * s;
}

double adeg(const ToricWeight& u, int k) { return adeg(gram_diagonal(u, k)); }

double adeg_from_norms(const std::vector<double>& norms) {
  double s = 0.0;
  for (double a : norms) {
    if (!(a > 0)) throw DomainError("adeg_from_norms: norms must be positive");
    s -= std::log(a);
  }
  return s;
}

LkAri l_k_ari(const ToricWeight& u, const ToricWeight& u0, int k, double factor) {
  const GramDiagonal g = gram_diagonal(u, k);
  const GramDiagonal g0 = gram_diagonal(u0, k);
  const double scale = factor / (static_cast<double>(k) * static_cast<double>(g.N()));
  LkAri r;
  r.value = scale * adeg(g);
  r.reference = scale * adeg(g0);
  r.lk = l_k_from_grams(g, g0);
  r.bridge_residual = std::abs((r.value - r.reference) - r.lk);
  return r;
}

HeightEstimate fit_height(const std::vector<int>& k_list, const std::vector<double>& values) {
  const std::size_t n = k_list.size();
  if (n < 4 || values.size() != n) throw DomainError("height fit: need at least four (k, adeg) pairs");
  for (std::size_t i = 1; i < n; ++i)
    if (k_list[i] <= k_list[i - 1]) throw DomainError("height fit: k_list must increase");
  if (k_list.front() < 2) throw DomainError("height fit: k must be >= 2");

  // Keep one degree of freedom for the residuals.
  const std::size_t p = std::min<std::size_t>(5, n - 1);
  const double kmax = k_list.back();
  // Columns scaled to O(1) at k = kmax for conditioning.
  auto column = [&](std::size_t c, double k) {
    switch (c) {
      case 0: return 0.5 * k * k / (0.5 * kmax * kmax);
      case 1: return k * std::log(k) / (kmax * std::log(kmax));
      case 2: return k / kmax;
      case 3: return std::log(k) / std::log(kmax);
      default: return 1.0;
    }
  };
  auto unscale = [&](std::size_t c) {
    switch (c) {
      case 0: return 0.5 * kmax * kmax;
      case 1: return kmax * std::log(kmax);
      case 2: return kmax;
      case 3: return std::log(kmax);
      default: return 1.0;
    }
  };
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) X(i, c) = column(c, k_list[i]);
    y(i) = values[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXd beta = qr.solve(y);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto sv = svd.singularValues();

  HeightEstimate h;
  h.k_list = k_list;
  h.adeg_list = values;
  h.extrapolation_order = static_cast<int>(p);
  for (std::size_t c = 0; c < p; ++c) h.coefficients.push_back(beta(c) / unscale(c));
  h.extrapolated_slope = h.coefficients[0];
  const Eigen::VectorXd res = y - X * beta;
  for (std::size_t i = 0; i < n; ++i) h.residuals.push_back(res(i));
  h.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  h.ill_conditioned = !(h.condition < 1e12) || qr.rank() < static_cast<Eigen::Index>(p);
  return h;
}

namespace {

std::vector<double> adeg_values(const ToricWeight& u, const std::vector<int>& k_list) {
  std::vector<double> out(k_list.size());
  parallel_for(k_list.size(), [&](std::size_t i) { out[i] = adeg(u, k_list[i]); });
  return out;
}

void check_k_list(const std::vector<int>& k_list) {
  if (k_list.size() < 4) throw DomainError("height_slope: need at least four k values");
  if (k_list.back() < 128) throw DomainError("height_slope: max k must be at least 128");
}

}  // namespace

HeightEstimate height_slope(const ToricWeight& u, const std::vector<int>& k_list) {
  check_k_list(k_list);
  return fit_height(k_list, adeg_values(u, k_list));
}

HeightEstimate height_slope_difference(const ToricWeight& u, const ToricWeight& u0,
                                       const std::vector<int>& k_list) {
  check_k_list(k_list);
  const auto a = adeg_values(u, k_list);
  const auto b = adeg_values(u0, k_list);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return fit_height(k_list, d);
}

// ---------------------------------------------------------------------------
// Lattices

std::vector<std::vector<std::int64_t>> short_vectors(const Eigen::MatrixXd& Q, double r2) {
  const Eigen::Index d = Q.rows();
  if (d < 1 || Q.cols() != d) throw DomainError("short_vectors: Gram matrix must be square");
  // Q = R^T R with R upper triangular; c^T Q c = sum_i q_ii (c_i + sum_{j>i} mu_ij c_j)^2.
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  if (llt.info() != Eigen::Success) throw DomainError("short_vectors: Gram matrix is not positive definite");
  const Eigen::MatrixXd R = llt.matrixU();
  std::vector<double> qd(d);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    qd[i] = R(i, i) * R(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) mu(i, j) = R(i, j) / R(i, i);
  }
  const double bound = r2 * (1 + 1e-12) + 1e-300;
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> c(d, 0);
  // Depth-first over coordinates d-1 .. 0.
  auto rec = [&](auto&& self, Eigen::Index i, double partial) -> void {
    double center = 0.0;
    for (Eigen::Index j = i + 1; j < d; ++j) center -= mu(i, j) * static_cast<double>(c[j]);
    const double room = (bound - partial) / qd[i];
    if (room < 0) return;
    const double w = std::sqrt(room);
    const auto lo = static_cast<std::int64_t>(std::ceil(center - w));
    const auto hi = static_cast<std::int64_t>(std::floor(center + w));
    for (std::int64_t x = lo; x <= hi; ++x) {
      c[i] = x;
      const double diff = static_cast<double>(x) - center;
      const double next = partial + qd[i] * diff * diff;
      if (next > bound) continue;
      if (i == 0) {
        if (std::any_of(c.begin(), c.end(), [](std::int64_t v) { return v != 0; })) out.push_back(c);
      } else {
        self(self, i - 1, next);
      }
    }
    c[i] = 0;
  };
  rec(rec, d - 1, 0.0);
  return out;
}

namespace {

// Rank of integer vectors by fraction-free elimination in long double.
class IndependenceTracker {
 public:
  explicit IndependenceTracker(std::size_t d) : d_(d) {}

  // Adds v if it is independent of the vectors kept so far.
  bool add(const std::vector<std::int64_t>& v) {
    std::vector<long double> r(v.begin(), v.end());
    for (std::size_t b = 0; b < rows_.size(); ++b) {
      const std::size_t p = pivots_[b];
      if (r[p] == 0) continue;
      const long double f = r[p] / rows_[b][p];
      for (std::size_t j = 0; j < d_; ++j) r[j] -= f * rows_[b][j];
      r[p] = 0;
    }
    long double best = 0;
    std::size_t piv = d_;
    for (std::size_t j = 0; j < d_; ++j)
      if (std::abs(r[j]) > best) {
        best = std::abs(r[j]);
        piv = j;
      }
    if (piv == d_ || best < 1e-9L) return false;
    rows_.push_back(std::move(r));
    pivots_.push_back(piv);
    return true;
  }
  [[nodiscard]] std::size_t rank() const { return rows_.size(); }

 private:
  std::size_t d_;
  std::vector<std::vector<long double>> rows_;
  std::vector<std::size_t> pivots_;
};

double qnorm2(const Eigen::MatrixXd& Q, const std::vector<std::int64_t>& c) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i)
    for (Eigen::Index j = 0; j < Q.cols(); ++j) s += Q(i, j) * static_cast<double>(c[i]) * static_cast<double>(c[j]);
  return s;
}

}  // namespace

double lambda_d(const Eigen::MatrixXd& Q) {
  const Eigen::Index d = Q.rows();
  if (d < 1 || Q.cols() != d) throw DomainError("lambda_d: Gram matrix must be square");
  if (d > 6) throw DomainError("lambda_d: rank above 6 is not supported");
  // The basis vectors are an independent family, so lambda_d <= max_i sqrt(Q_ii).
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) r2 = std::max(r2, Q(i, i));
  auto vecs = short_vectors(Q, r2);
  std::vector<std::pair<double, std::size_t>> order(vecs.size());
  for (std::size_t i = 0; i < vecs.size(); ++i) order[i] = {qnorm2(Q, vecs[i]), i};
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return vecs[a.second] < vecs[b.second];
  });
  IndependenceTracker tracker(static_cast<std::size_t>(d));
  for (const auto& [n2, idx] : order) {
    if (tracker.add(vecs[idx]) && tracker.rank() == static_cast<std::size_t>(d)) return std::sqrt(n2);
  }
  throw ContractError("lambda_d: enumeration did not reach full rank");
}

MinimaCheck minima_inequality_check(const Eigen::MatrixXd& Q, const Eigen::MatrixXi& S) {
  const Eigen::Index d = Q.rows();
  const Eigen::Index dp = S.cols();
  if (S.rows() != d || dp < 1 || dp > d) throw DomainError("minima_inequality_check: bad sublattice basis");
  IndependenceTracker cols(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < dp; ++j) {
    std::vector<std::int64_t> v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = S(i, j);
    if (!cols.add(v)) throw DomainError("minima_inequality_check: sublattice basis is not independent");
  }
  const Eigen::MatrixXd Sd = S.cast<double>();
  const Eigen::MatrixXd Qp = Sd.transpose() * Q * Sd;
  Eigen::LLT<Eigen::MatrixXd> a(Q), b(Qp);
  if (a.info() != Eigen::Success) throw DomainError("minima_inequality_check: Q not positive definite");
  if (b.info() != Eigen::Success) throw DomainError("minima_inequality_check: sublattice basis is not independent");
  auto half_logdet = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    double s = 0.0;
    const Eigen::MatrixXd L = llt.matrixL();
    for (Eigen::Index i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
    return s;
  };
  MinimaCheck r;
  r.adeg_M = -half_logdet(a);
  r.adeg_Mprime = -half_logdet(b);
  r.lambda = lambda_d(Q);
  r.lhs = r.adeg_M - r.adeg_Mprime;
  r.rhs = -std::lgamma(static_cast<double>(d) + 1.0) - static_cast<double>(d - dp) * std::log(r.lambda / 2.0);
  r.holds = r.lhs >= r.rhs - 1e-10 * (1.0 + std::abs(r.rhs));
  return r;
}

std::string height_csv(const HeightEstimate& h) {
  std::string out = "k,adeg,2adeg_over_k2,fitted_h,residual\n";
  char buf[160];
  for (std::size_t i = 0; i < h.k_list.size(); ++i) {
    const double k = h.k_list[i];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", h.k_list[i], h.adeg_list[i],
                  2.0 * h.adeg_list[i] / (k * k), h.extrapolated_slope, h.residuals[i]);
    out += buf;
  }
  return out;
}

}  // namespace toriclab
