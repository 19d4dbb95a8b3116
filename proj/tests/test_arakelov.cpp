#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "toriclab/arakelov.hpp"
#include "toriclab/functionals.hpp"

using namespace toriclab;

namespace {

std::vector<int> k_range(int a, int b, int step) {
  std::vector<int> v;
  for (int k = a; k <= b; k += step) v.push_back(k);
  return v;
}

// Brute force: every vector in the box |c_i| <= r sqrt((Q^-1)_ii), sorted by
// norm, rank tested with a full-pivot LU on the accumulated set.
double lambda_bruteforce(const Eigen::MatrixXd& Q, double radius) {
  const int d = static_cast<int>(Q.rows());
  const Eigen::MatrixXd Qi = Q.inverse();
  std::vector<int> box(d);
  for (int i = 0; i < d; ++i) box[i] = static_cast<int>(std::ceil(radius * std::sqrt(Qi(i, i))));
  std::vector<std::pair<double, Eigen::VectorXd>> vecs;
  Eigen::VectorXi c = Eigen::VectorXi::Zero(d);
  for (int i = 0; i < d; ++i) c(i) = -box[i];
  while (true) {
    if (c.cwiseAbs().sum() != 0) {
      const Eigen::VectorXd x = c.cast<double>();
      vecs.emplace_back(x.dot(Q * x), x);
    }
    int i = 0;
    while (i < d && c(i) == box[i]) c(i) = -box[i], ++i;
    if (i == d) break;
    ++c(i);
  }
  std::sort(vecs.begin(), vecs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Eigen::MatrixXd span(d, 0);
  for (const auto& [n2, x] : vecs) {
    Eigen::MatrixXd next(d, span.cols() + 1);
    next << span, x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(next);
    if (lu.rank() > span.cols()) {
      span = next;
      if (span.cols() == d) return std::sqrt(n2);
    }
  }
  return NAN;
}

Eigen::MatrixXd random_gram(std::mt19937_64& rng, int d) {
  std::uniform_int_distribution<int> e(-3, 3);
  while (true) {
    Eigen::MatrixXd B(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) B(i, j) = e(rng);
    if (std::abs(B.determinant()) > 0.5) return B.transpose() * B;
  }
}

Eigen::MatrixXi random_sub_basis(std::mt19937_64& rng, int d, int dp) {
  std::uniform_int_distribution<int> e(-2, 2);
  while (true) {
    Eigen::MatrixXi S(d, dp);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < dp; ++j) S(i, j) = e(rng);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S.cast<double>());
    if (lu.rank() == dp) return S;
  }
}

}  // namespace

TEST_CASE("adeg examples") {
  CHECK(adeg_from_norms({2.5}) == doctest::Approx(-std::log(2.5)).epsilon(1e-15));
  auto fs = make_weight(WeightSpec::fubini_study(1));
  CHECK(adeg(fs, 3) == doctest::Approx(-std::log(M_PI)).epsilon(1e-12));

  for (double c : {-0.7, 0.4}) {
    auto sh = make_weight(WeightSpec::shifted(WeightSpec::fubini_study(2), c));
    auto base = make_weight(WeightSpec::fubini_study(2));
    for (int k : {2, 7, 40}) {
      const double kn = k * (2.0 * k - 1.0);
      CHECK(adeg(sh, k) - adeg(base, k) == doctest::Approx(kn * c / 2).epsilon(1e-12));
    }
  }
}

TEST_CASE("bridge identity") {
  auto fs = make_weight(WeightSpec::fubini_study(1));
  CHECK(l_k_ari(fs, fs, 16).bridge_residual == 0.0);

  auto sh = make_weight(WeightSpec::shifted(WeightSpec::fubini_study(1), 0.3));
  auto r = l_k_ari(sh, fs, 16);
  CHECK(r.value - r.reference == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.lk == doctest::Approx(0.3).epsilon(1e-12));

  auto bump = make_weight(WeightSpec::perturbed(WeightSpec::fubini_study(1), 0.3, 0.5, 1.5));
  auto sing = make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1), 0.2));
  for (const auto* u : {&bump, &sing}) {
    for (int k : {8, 32, 128}) CHECK(l_k_ari(*u, fs, k).bridge_residual <= 1e-10);
  }
  // Factor 1 in place of 2 breaks the identity.
  CHECK(l_k_ari(bump, fs, 32, 1.0).bridge_residual > 1e-3);
}

TEST_CASE("height fits") {
  auto fs1 = make_weight(WeightSpec::fubini_study(1));
  auto sh = make_weight(WeightSpec::shifted(WeightSpec::fubini_study(1), 0.25));
  auto d = height_slope_difference(sh, fs1, {32, 64, 96, 128, 192, 256});
  CHECK(d.extrapolated_slope == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_FALSE(d.ill_conditioned);

  auto a = height_slope(fs1, k_range(64, 256, 16));
  auto b = height_slope(fs1, k_range(128, 512, 32));
  CHECK(std::abs(a.extrapolated_slope - b.extrapolated_slope) < 1e-3);
  CHECK(std::isfinite(a.extrapolated_slope));

  auto bump = make_weight(WeightSpec::perturbed(WeightSpec::fubini_study(1), 0.3, 0.0, 1.0));
  const double E = energy_direct(bump, fs1);
  auto db = height_slope_difference(bump, fs1, k_range(16, 256, 16));
  CHECK(std::abs(db.extrapolated_slope - E) < 0.02 * std::abs(E));
  // The raw ratio converges monotonically toward m E.
  double prev = INFINITY;
  for (std::size_t i = 0; i < db.k_list.size(); ++i) {
    const double k = db.k_list[i];
    const double gap = std::abs(2 * db.adeg_list[i] / (k * k) - E);
    CHECK(gap < prev);
    prev = gap;
  }

  auto sing = make_weight(WeightSpec::log_singular(WeightSpec::fubini_study(1), 0.2));
  const auto Es = energy_singular(sing, fs1);
  REQUIRE(Es.finite);
  auto ds = height_slope_difference(sing, fs1, k_range(16, 256, 16));
  CHECK(std::abs(ds.extrapolated_slope - Es.value) < 0.05 * std::abs(Es.value));

  CHECK_THROWS_AS(height_slope(fs1, {8, 16, 32}), DomainError);
  CHECK_THROWS_AS(height_slope(fs1, {8, 16, 32, 64}), DomainError);
  CHECK_THROWS_AS(fit_height({8, 8, 16, 32}, {0, 0, 0, 0}), DomainError);

  auto csv = height_csv(a);
  CHECK(csv.rfind("k,adeg,2adeg_over_k2,fitted_h,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(a.k_list.size() + 1));
}

TEST_CASE("lambda_d") {
  CHECK(lambda_d(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
  Eigen::MatrixXd D(2, 2);
  D << 1, 0, 0, 9;
  CHECK(lambda_d(D) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lambda_d(Eigen::MatrixXd::Identity(7, 7)), DomainError);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::MatrixXd Q = random_gram(rng, 3);
    const double lam = lambda_d(Q);
    CHECK(lambda_bruteforce(Q, 2 * lam) == doctest::Approx(lam).epsilon(1e-12));
  }
}

TEST_CASE("short vectors") {
  Eigen::MatrixXd Q(2, 2);
  Q << 2, 1, 1, 2;  // hexagonal
  CHECK(short_vectors(Q, 2.0).size() == 6);
  CHECK(short_vectors(Eigen::MatrixXd::Identity(3, 3), 1.0).size() == 6);
}

TEST_CASE("minima inequality") {
  // M' = M.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(3, 3) * 2.0;
  auto r = minima_inequality_check(Q, Eigen::MatrixXi::Identity(3, 3));
  CHECK(r.lhs == doctest::Approx(0.0));
  CHECK(r.rhs == doctest::Approx(-std::log(6.0)));
  CHECK(r.holds);

  // Boundary-tight orthonormal case.
  Eigen::MatrixXi axis(2, 1);
  axis << 1, 0;
  auto t = minima_inequality_check(Eigen::MatrixXd::Identity(2, 2), axis);
  CHECK(t.lhs == doctest::Approx(0.0));
  CHECK(t.rhs == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(t.holds);

  Eigen::MatrixXi dependent(2, 2);
  dependent << 1, 2, 1, 2;
  CHECK_THROWS_AS(minima_inequality_check(Eigen::MatrixXd::Identity(2, 2), dependent), DomainError);

  std::mt19937_64 rng(2024);
  int held = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 3;
    const int dp = 1 + static_cast<int>(rng() % d);
    const double scale = std::exp(std::uniform_real_distribution<double>(-2, 2)(rng));
    Eigen::MatrixXd G = random_gram(rng, d) * scale;
    auto c = minima_inequality_check(G, random_sub_basis(rng, d, dp));
    held += c.holds ? 1 : 0;
  }
  CHECK(held == 1000);
}
