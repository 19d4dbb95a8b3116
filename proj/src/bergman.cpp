#include "toriclab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "toriclab/kernels.hpp"
#include "toriclab/parallel.hpp"

namespace toriclab {

namespace {

const double kLog4Pi = std::log(4.0 * std::numbers::pi);
constexpr double kNegligible = 46.0;  // e^-46 ~ 1e-20 relative
constexpr std::size_t kMaxTailNodes = 2'000'000;

// Everything the Gram integrals need about one (u, k) pair. Exponents are
// E_j(t) = base(t) + 2 j t with base(t) = 2 t - 2 k u(t).
struct Quadrature {
  int k = 0;
  int m = 0;
  double h = 0.0;
  std::vector<double> t, base;  // uniform grid
  // Nodes left of the grid (t0 included, weight = half its left gap), used
  // when the left tail is not affine.
  std::vector<double> et, eb, ew;
  double tl = 0.0, bl = 0.0;  // start of the analytic left tail
  double left_rate_slope = 0.0;  // u' used for the analytic left tail
  double right_slope = 0.0;

  [[nodiscard]] std::size_t N() const { return static_cast<std::size_t>(k * m - 1); }
};

Quadrature make_quadrature(const ToricWeight& u, int k) {
  if (k < 1) throw DomainError("gram_diagonal: k must be >= 1");
  const int m = u.degree();
  if (k * m < 2) throw DomainError("gram_diagonal: need k m >= 2 for a non-zero adjoint space");
  if (u.right_slope() <= 0.0) throw DomainError("gram_diagonal: right slope must be positive");
  Quadrature q;
  q.k = k;
  q.m = m;
  const UniformGrid& g = u.grid();
  q.h = g.step();
  q.t = g.points();
  q.base.resize(q.t.size());
  const auto v = u.values();
  for (std::size_t i = 0; i < q.t.size(); ++i) q.base[i] = 2.0 * q.t[i] - 2.0 * k * v[i];
  q.right_slope = u.right_slope();

  const double t0 = g.t_min;
  q.tl = t0;
  q.bl = q.base.front();
  q.left_rate_slope = u.left_slope();
  const auto& tail = u.singular_tail();
  const double ts = u.floor_crossing();
  if (!tail || tail->epsilon <= 0 || ts >= t0) {
    q.left_rate_slope = tail ? u.left_tail_slope_at_start() : u.left_slope();
    return q;
  }

  // Singular branch: march left with the grid step until the j = 0 integrand
  // is negligible and decaying, or the floor takes over.
  double running_max = *std::max_element(q.base.begin(), q.base.end());
  q.et.push_back(t0);
  q.eb.push_back(q.base.front());
  q.ew.push_back(0.0);
  double t = t0;
  while (true) {
    if (q.et.size() > kMaxTailNodes) throw DomainError("gram_diagonal: singular tail integral does not decay");
    double tn = t - q.h;
    const bool hit_floor = tn <= ts;
    if (hit_floor) tn = ts;
    const double gap = t - tn;
    q.ew.back() += 0.5 * gap;
    const double bn = 2.0 * tn - 2.0 * k * u.left_tail_value(tn);
    q.et.push_back(tn);
    q.eb.push_back(bn);
    q.ew.push_back(0.5 * gap);
    running_max = std::max(running_max, bn);
    t = tn;
    if (hit_floor) {
      q.left_rate_slope = u.left_slope();
      break;
    }
    const double slope = u.left_tail_derivative(tn);
    if (bn < running_max - kNegligible && 2.0 - 2.0 * k * slope > 0) {
      q.left_rate_slope = slope;  // u' only decreases further left, so this bounds the rest
      break;
    }
  }
  q.tl = q.et.back();
  q.bl = q.eb.back();
  return q;
}

// Pieces of one Gram integral, each as log of its value.
struct GramPieces {
  double log_total = 0.0;
  double log_grid = 0.0;
  double log_left = -std::numeric_limits<double>::infinity();
  double log_right = -std::numeric_limits<double>::infinity();
  double left_mean = 0.0;
  double right_mean = 0.0;
};

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

GramPieces gram_pieces(const Quadrature& q, std::size_t j) {
  const double A = 2.0 * static_cast<double>(j) + 2.0;
  const double slope = 2.0 * static_cast<double>(j);
  GramPieces p;

  // Grid: trapezoid = h (sum - (first + last) / 2).
  const double M = kernels::max_affine(q.base, q.t, slope);
  const double S = kernels::sum_exp_affine(q.base, q.t, slope, M);
  const double e0 = std::exp(q.base.front() + slope * q.t.front() - M);
  const double eG = std::exp(q.base.back() + slope * q.t.back() - M);
  p.log_grid = M + std::log(q.h * (S - 0.5 * (e0 + eG)));

  // Right tail: affine with slope right_slope beyond t_G.
  const double right_rate = 2.0 * q.k * q.right_slope - A;
  if (!(right_rate > 0)) throw DomainError("gram_diagonal: right tail integral diverges (slope admissibility violated)");
  p.log_right = q.base.back() + slope * q.t.back() - std::log(right_rate);
  p.right_mean = q.t.back() + 1.0 / right_rate;

  // Left tail: numeric extension (if any) plus the analytic remainder.
  const double left_rate = A - 2.0 * q.k * q.left_rate_slope;
  if (!(left_rate > 0)) throw DomainError("gram_diagonal: left tail integral diverges (slope admissibility violated)");
  const double log_analytic = q.bl + slope * q.tl - std::log(left_rate);
  double log_left = log_analytic;
  double mean_num = 0.0;
  if (!q.et.empty()) {
    double em = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.et.size(); ++i) em = std::max(em, q.eb[i] + slope * q.et[i]);
    double s = 0.0, st = 0.0;
    for (std::size_t i = 0; i < q.et.size(); ++i) {
      const double w = q.ew[i] * std::exp(q.eb[i] + slope * q.et[i] - em);
      s += w;
      st += w * q.et[i];
    }
    const double log_ext = em + std::log(s);
    log_left = log_add(log_ext, log_analytic);
    mean_num = std::exp(log_ext - log_left) * (st / s);
  }
  p.left_mean = mean_num + std::exp(log_analytic - log_left) * (q.tl - 1.0 / left_rate);
  p.log_left = log_left;

  p.log_total = log_add(log_add(p.log_grid, p.log_left), p.log_right);
  if (!std::isfinite(p.log_total)) throw DomainError("gram_diagonal: non-finite Gram entry");
  return p;
}

std::vector<GramPieces> all_pieces(const Quadrature& q) {
  std::vector<GramPieces> out(q.N());
  parallel_for(out.size(), [&](std::size_t j) { out[j] = gram_pieces(q, j); });
  return out;
}

}  // namespace

GramDiagonal gram_diagonal(const ToricWeight& u, int k) {
  const Quadrature q = make_quadrature(u, k);
  const auto pieces = all_pieces(q);
  GramDiagonal g;
  g.k = k;
  g.m = u.degree();
  g.log_entries.resize(pieces.size());
  for (std::size_t j = 0; j < pieces.size(); ++j) g.log_entries[j] = kLog4Pi + pieces[j].log_total;
  return g;
}

GramMatrix2D gram_full_2d(const ToricWeight& u, int k, std::size_t n_theta) {
  const Quadrature q = make_quadrature(u, k);
  if (!q.et.empty()) throw DomainError("gram_full_2d: plain tails only");
  const std::size_t n = q.N();
  GramMatrix2D G;
  G.n = n;
  G.re.assign(n * n, 0.0);
  G.im.assign(n * n, 0.0);
  // <z^a dz, z^b dz> = int int e^{(a+b+2)t - 2ku} e^{i(a-b)theta} 2 dt dtheta.
  // The radial part (a+b+2)/2 = j + 1 has the same form as a diagonal entry.
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double A = static_cast<double>(a + b + 2);
      double radial = 0.0;
      for (std::size_t i = 0; i < q.t.size(); ++i) {
        const double w = (i == 0 || i + 1 == q.t.size()) ? 0.5 * q.h : q.h;
        radial += w * std::exp(q.base[i] + (A - 2.0) * q.t[i]);
      }
      radial += std::exp(q.bl + (A - 2.0) * q.tl) / (A - 2.0 * k * q.left_rate_slope);
      radial += std::exp(q.base.back() + (A - 2.0) * q.t.back()) / (2.0 * k * q.right_slope - A);
      double c = 0.0, s = 0.0;
      for (std::size_t r = 0; r < n_theta; ++r) {
        const double th = two_pi * static_cast<double>(r) / static_cast<double>(n_theta);
        const double ang = (static_cast<double>(a) - static_cast<double>(b)) * th;
        c += std::cos(ang);
        s += std::sin(ang);
      }
      const double scale = 2.0 * two_pi / static_cast<double>(n_theta);
      G.re[a * n + b] = scale * c * radial;
      G.im[a * n + b] = scale * s * radial;
    }
  }
  return G;
}

double l_k_from_grams(const GramDiagonal& a, const GramDiagonal& b) {
  if (a.k != b.k || a.m != b.m || a.N() != b.N()) throw DomainError("l_k: Gram matrices are not comparable");
  double s = 0.0;
  for (std::size_t j = 0; j < a.N(); ++j) s += a.log_entries[j] - b.log_entries[j];
  return -s / (static_cast<double>(a.k) * static_cast<double>(a.N()));
}

double l_k(const ToricWeight& u, const ToricWeight& u0, int k) {
  if (u.degree() != u0.degree()) throw DomainError("l_k: weights have different degrees");
  return l_k_from_grams(gram_diagonal(u, k), gram_diagonal(u0, k));
}

Measure1D bergman_density(const ToricWeight& u, int k) {
  const Quadrature q = make_quadrature(u, k);
  const auto pieces = all_pieces(q);
  const std::size_t N = pieces.size();
  const double invN = 1.0 / static_cast<double>(N);
  Measure1D mu{u.grid(), std::vector<double>(q.t.size(), 0.0), {}};
  double left_mass = 0.0, left_moment = 0.0, right_mass = 0.0, right_moment = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    const auto& p = pieces[j];
    kernels::accumulate_exp_affine(q.base, q.t, 2.0 * static_cast<double>(j), p.log_total, invN, mu.density);
    const double lm = invN * std::exp(p.log_left - p.log_total);
    const double rm = invN * std::exp(p.log_right - p.log_total);
    left_mass += lm;
    left_moment += lm * p.left_mean;
    right_mass += rm;
    right_moment += rm * p.right_mean;
  }
  if (left_mass > 0) mu.atoms.push_back({left_moment / left_mass, left_mass});
  if (right_mass > 0) mu.atoms.push_back({right_moment / right_mass, right_mass});
  return mu;
}

double morse_ratio(const ToricWeight& u, int k) {
  if (u.singular_tail()) throw DomainError("morse_ratio: weight must be smooth (no singular tail)");
  if (!monge_ampere(u).atoms.empty()) throw DomainError("morse_ratio: weight has Monge-Ampere atoms");
  const auto beta = bergman_density(u, k);
  const auto v = u.values();
  const double h = u.grid().step();
  const double m = u.degree();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i + 2 < v.size(); ++i) {
    const double d2 = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1] - v[i - 2]) / (12.0 * h * h);
    const double ma = d2 / m;
    if (ma < kAtomFloor) continue;
    worst = std::max(worst, beta.density[i] / ma - 1.0);
  }
  if (!std::isfinite(worst)) throw DomainError("morse_ratio: Monge-Ampere density below cutoff everywhere");
  return worst;
}

GateauxReport gateaux_check_lk(const ToricWeight& u, std::span<const double> v, int k,
                               const std::vector<double>& steps) {
  const GramDiagonal g0 = gram_diagonal(u, k);
  return gateaux_check([&](const ToricWeight& w) { return l_k_from_grams(gram_diagonal(w, k), g0); }, u, v,
                       bergman_density(u, k), steps);
}

std::vector<PathValue> lk_along_geodesic(const GeodesicPath& path, int k, int samples) {
  if (samples < 2) throw DomainError("lk_along_geodesic: need at least two samples");
  const GramDiagonal g0 = gram_diagonal(path.start(), k);
  std::vector<PathValue> out(static_cast<std::size_t>(samples));
  parallel_for(out.size(), [&](std::size_t i) {
    const double s = i + 1 == out.size() ? 1.0 : static_cast<double>(i) / (samples - 1);
    out[i] = {s, l_k_from_grams(gram_diagonal(path.sample(s), k), g0)};
  });
  return out;
}

double min_second_difference(const std::vector<PathValue>& seq) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < seq.size(); ++i)
    worst = std::min(worst, seq[i + 1].value - 2.0 * seq[i].value + seq[i - 1].value);
  return worst;
}

std::string gram_csv(const GramDiagonal& g) {
  std::string out = "k,j,log_G_jj\n";
  char buf[96];
  for (std::size_t j = 0; j < g.N(); ++j) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g\n", g.k, j, g.log_entries[j]);
    out += buf;
  }
  return out;
}

}  // namespace toriclab
