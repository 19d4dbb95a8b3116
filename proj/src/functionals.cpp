#include "toriclab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace toriclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_slopes(double a, double b, int m) { return std::abs(a - b) <= 1e-12 * (1.0 + m); }

double interp_on_grid(const UniformGrid& g, std::span<const double> f, double t) {
  if (t <= g.t_min) return f.front();
  if (t >= g.t_max) return f.back();
  const double pos = (t - g.t_min) / g.step();
  const std::size_t i = std::min(static_cast<std::size_t>(pos), g.count - 2);
  const double w = pos - static_cast<double>(i);
  return f[i] + w * (f[i + 1] - f[i]);
}

// Composite Simpson rule with an even number of intervals.
template <class F>
double simpson(F&& f, double a, double b, int intervals) {
  if (b <= a) return 0.0;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

// int_{ts}^{t0} g'(t)^2 dt, substituting t = t0 - expm1(w).
double loglog_slope_energy(double t0, double ts) {
  const double W = std::log1p(t0 - ts);
  auto integrand = [t0](double w) {
    const double d = loglog_profile_d1(t0 - std::expm1(w));
    return d * d * std::exp(w);
  };
  return simpson(integrand, 0.0, W, 8192);
}

void require_comparable(const ToricWeight& u, const ToricWeight& u0, const char* who) {
  if (u.degree() != u0.degree())
    throw DomainError(std::string(who) + ": weights have different degrees");
  if (!(u.grid() == u0.grid())) throw DomainError(std::string(who) + ": weights live on different grids");
}

}  // namespace

// ---------------------------------------------------------------------------
// Measure1D

double Measure1D::density_mass() const {
  const auto w = grid.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) s += w[i] * density[i];
  return s;
}

double Measure1D::total_mass() const {
  double s = density_mass();
  for (const auto& a : atoms) s += a.mass;
  return s;
}

double Measure1D::integrate(const std::function<double(double)>& f) const {
  const auto w = grid.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i)
    if (density[i] != 0.0) s += w[i] * density[i] * f(grid.at(i));
  for (const auto& a : atoms) s += a.mass * f(a.location);
  return s;
}

double Measure1D::integrate_samples(std::span<const double> f) const {
  if (f.size() != grid.count) throw DomainError("integrate_samples: size mismatch");
  const auto w = grid.trapezoid_weights();
  double s = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) s += w[i] * density[i] * f[i];
  for (const auto& a : atoms) s += a.mass * interp_on_grid(grid, f, a.location);
  return s;
}

// ---------------------------------------------------------------------------
// Monge-Ampere

Measure1D monge_ampere(const ToricWeight& u) {
  const double m = u.degree();
  const UniformGrid& g = u.grid();
  std::vector<double> mass = u.vertex_masses();
  for (double& x : mass) x = std::max(0.0, x) / m;
  const auto w = g.trapezoid_weights();
  const std::size_t n = mass.size();

  Measure1D mu{g, std::vector<double>(n, 0.0), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? mass[i - 1] : 0.0;
    const double right = i + 1 < n ? mass[i + 1] : 0.0;
    const bool kink = mass[i] > kAtomFloor && mass[i] > kAtomRatio * left && mass[i] > kAtomRatio * right;
    if (kink) mu.atoms.push_back({g.at(i), mass[i]});
    else mu.density[i] = mass[i] / w[i];
  }

  // Curvature of a singular left tail: density -eps g'' on (t*, t0), lumped
  // into log-spaced cells, plus the slope jump at the floor crossing t*.
  const auto& tail = u.singular_tail();
  if (tail && tail->epsilon > 0) {
    const double eps = tail->epsilon;
    const double t0 = g.t_min;
    const double ts = u.floor_crossing();
    if (ts < t0) {
      const bool floored = std::isfinite(ts);
      const double smax = floored ? t0 - ts : 1e300;
      constexpr int kCells = 200;
      const double dw = std::log1p(smax) / kCells;
      double s_prev = 0.0;
      for (int j = 1; j <= kCells; ++j) {
        const double s = j == kCells ? smax : std::expm1(dw * j);
        const double cell = -eps * (loglog_profile_d1(t0 - s_prev) - loglog_profile_d1(t0 - s));
        const double mid = s_prev > 0 ? std::sqrt(s_prev * s) : 0.5 * s;
        if (cell > 0) mu.atoms.push_back({t0 - mid, cell / m});
        s_prev = s;
      }
      const double rest = -eps * loglog_profile_d1(t0 - smax);
      if (rest > 0) mu.atoms.push_back({floored ? ts : t0 - smax * std::exp(1.0), rest / m});
    }
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Energy

double energy_direct(const ToricWeight& u, const ToricWeight& u0) {
  require_comparable(u, u0, "energy_direct");
  const int m = u.degree();
  if (u0.singular_tail()) throw DomainError("energy_direct: reference weight must have plain tails");
  if (u.is_singular())
    throw DomainError("energy_direct: phi is unbounded (singular tail); use energy_singular");
  if (!same_slopes(u.left_slope(), u0.left_slope(), m) || !same_slopes(u.right_slope(), u0.right_slope(), m))
    throw DomainError("energy_direct: tail slopes differ, so phi is unbounded; use energy_singular");

  const auto mu = u.vertex_masses();
  const auto nu = u0.vertex_masses();
  const auto a = u.values();
  const auto b = u0.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += 2.0 * (a[i] - b[i]) * (mu[i] + nu[i]);

  // Truncated singular tail: int phi (-eps g'') + phi(t*) * jump, which after
  // integration by parts is -eps phi(t0) g'(t0) - 2 eps^2 int_{t*}^{t0} g'^2.
  const auto& tail = u.singular_tail();
  if (tail && tail->epsilon > 0) {
    const double t0 = u.grid().t_min;
    const double ts = u.floor_crossing();
    if (ts < t0) {
      const double eps = tail->epsilon;
      const double phi0 = 2.0 * (a[0] - b[0]);
      s += -eps * phi0 * loglog_profile_d1(t0) - 2.0 * eps * eps * loglog_slope_energy(t0, ts);
    }
  }
  return s / (2.0 * m);
}

double energy_legendre(const ToricWeight& u, const ToricWeight& u0) {
  if (u.degree() != u0.degree()) throw DomainError("energy_legendre: weights have different degrees");
  if (!u.has_minimal_singularities() || !u0.has_minimal_singularities())
    throw DomainError("energy_legendre: both weights need minimal singularities");
  const double m = u.degree();
  return 2.0 / m * (legendre(u0).integral() - legendre(u).integral());
}

ToricWeight truncate_weight(const ToricWeight& u, const ToricWeight& u0, double j) {
  require_comparable(u, u0, "truncate_weight");
  if (u0.singular_tail()) throw DomainError("truncate_weight: reference weight must have plain tails");
  if (!same_slopes(u.left_slope(), u0.left_slope(), u.degree()))
    throw DomainError("truncate_weight: left slopes differ");
  GridFunction f = u.as_grid_function();
  const auto b = u0.values();
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::max(f.values[i], b[i] - 0.5 * j);
  f.right_slope = std::max(u.right_slope(), u0.right_slope());
  if (f.singular_tail) {
    TailFloor fl{b[0] - 0.5 * j, u0.left_slope()};
    if (f.singular_tail->floor) fl.value = std::max(fl.value, f.singular_tail->floor->value);
    f.singular_tail->floor = fl;
  }
  return psh_project(f, u.degree());
}

SingularEnergy energy_singular(const ToricWeight& u_sing, const ToricWeight& u0,
                               const std::vector<double>& schedule) {
  if (schedule.empty()) throw DomainError("energy_singular: empty schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i - 1])) throw DomainError("energy_singular: schedule must increase");

  SingularEnergy out;
  out.levels = schedule;
  for (double j : schedule) out.trace.push_back(energy_direct(truncate_weight(u_sing, u0, j), u0));

  const auto& E = out.trace;
  const double scale = 1.0 + std::abs(E.back());
  for (std::size_t i = 1; i < E.size(); ++i)
    if (E[i] > E[i - 1] + 1e-12 * scale) out.monotone = false;

  const std::size_t n = E.size();
  const double d_last = n >= 2 ? E[n - 2] - E[n - 1] : 0.0;
  const double d_prev = n >= 3 ? E[n - 3] - E[n - 2] : 0.0;
  out.value = E.back();
  if (n >= 2 && std::abs(d_last) <= 1e-12 * scale) {
    // Converged to round-off; nothing left to extrapolate.
    out.finite = true;
    out.contraction = d_prev > 1e-12 * scale ? std::max(0.0, d_last) / d_prev : 0.0;
    return out;
  }
  if (n < 3) {
    out.message = "need at least three truncation levels";
    return out;
  }
  const double q = d_prev > 0 ? d_last / d_prev : kInf;
  out.contraction = q;
  if (!(q >= 0 && q < 0.9)) {
    out.message = "energy -inf suspected: truncation differences do not contract";
    return out;
  }
  out.value = E.back() - d_last * q / (1.0 - q);
  out.finite = d_last <= kTolEnergy;
  if (!out.finite) out.message = "trace not yet Cauchy; extend the schedule";
  return out;
}

// ---------------------------------------------------------------------------
// Geodesics

GeodesicPath geodesic(const ToricWeight& u0, const ToricWeight& u1) {
  require_comparable(u0, u1, "geodesic");
  if (!u0.has_minimal_singularities() || !u1.has_minimal_singularities())
    throw DomainError("geodesic: endpoints need minimal singularities");
  GeodesicPath p(u0, u1);
  p.kind_ = GeodesicPath::Kind::Geodesic;
  double diff = 0.0;
  for (std::size_t i = 0; i < u0.values().size(); ++i)
    diff = std::max(diff, std::abs(u0.values()[i] - u1.values()[i]));
  if (diff < 1e-12) {
    p.constant_ = true;
    return p;
  }
  const auto c0 = legendre(u0);
  const auto c1 = legendre(u1);
  std::vector<double> knots;
  std::merge(c0.moment_grid().begin(), c0.moment_grid().end(), c1.moment_grid().begin(),
             c1.moment_grid().end(), std::back_inserter(knots));
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  p.dual0_.reserve(knots.size());
  p.dual1_.reserve(knots.size());
  for (double x : knots) {
    p.dual0_.push_back(c0(x));
    p.dual1_.push_back(c1(x));
  }
  p.knots_ = std::move(knots);
  return p;
}

GeodesicPath barrier_subgeodesic(const ToricWeight& u0, const ToricWeight& u1, double C) {
  require_comparable(u0, u1, "barrier_subgeodesic");
  if (!u0.has_minimal_singularities() || !u1.has_minimal_singularities())
    throw DomainError("barrier_subgeodesic: endpoints need minimal singularities");
  if (!std::isfinite(C) || C < 0) throw DomainError("barrier_subgeodesic: C must be finite and >= 0");
  GeodesicPath p(u0, u1);
  p.kind_ = GeodesicPath::Kind::BarrierSubgeodesic;
  p.C_ = C;
  double sup = 0.0;
  for (std::size_t i = 0; i < u0.values().size(); ++i)
    sup = std::max(sup, std::abs(u1.values()[i] - u0.values()[i]));
  if (C < 2.0 * sup) {
    std::ostringstream os;
    os << "barrier constant C=" << C << " is below 2 sup|u1-u0| = " << 2.0 * sup
       << "; endpoints will not be matched";
    p.warning_ = os.str();
  }
  return p;
}

ToricWeight GeodesicPath::sample(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("GeodesicPath::sample: s must lie in [0, 1]");
  if (s == 0.0 || constant_) return u0_;
  if (s == 1.0) return u1_;
  const int m = u0_.degree();
  if (kind_ == Kind::Geodesic) {
    std::vector<double> v(knots_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - s) * dual0_[i] + s * dual1_[i];
    return inverse_legendre(ConvexConjugate(knots_, std::move(v)), u0_.grid(), m);
  }
  GridFunction f = u0_.as_grid_function();
  const auto a = u0_.values();
  const auto b = u1_.values();
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = std::max(a[i] - 0.5 * C_ * s, b[i] + 0.5 * C_ * (s - 1.0));
  return psh_project(f, m);
}

std::vector<double> GeodesicPath::initial_velocity(double h) const {
  const std::size_t n = u0_.values().size();
  std::vector<double> vel(n, 0.0);
  if (constant_) return vel;
  if (kind_ == Kind::BarrierSubgeodesic) {
    const auto us = sample(h);
    for (std::size_t i = 0; i < n; ++i) vel[i] = 2.0 * (us.values()[i] - u0_.values()[i]) / h;
    return vel;
  }
  // Maximizers of x t_i - u0*(x) form [slope left of t_i, slope right of t_i];
  // the velocity is the max of u0* - u1* there (u units), doubled for phi.
  const auto v = u0_.values();
  const double hstep = u0_.grid().step();
  const std::size_t K = knots_.size();
  auto diff_at = [&](double x) {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t k = it == knots_.end() ? K - 1 : static_cast<std::size_t>(it - knots_.begin());
    if (k == 0) return dual0_[0] - dual1_[0];
    const double w = (x - knots_[k - 1]) / (knots_[k] - knots_[k - 1]);
    return (1 - w) * (dual0_[k - 1] - dual1_[k - 1]) + w * (dual0_[k] - dual1_[k]);
  };
  const double lo = u0_.left_slope(), hi = u0_.right_slope();
  double a = lo;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = i + 1 < n ? std::clamp((v[i + 1] - v[i]) / hstep, a, hi) : hi;
    double best = std::max(diff_at(a), diff_at(b));
    while (k < K && knots_[k] < a) ++k;
    for (std::size_t q = k; q < K && knots_[q] <= b; ++q) best = std::max(best, dual0_[q] - dual1_[q]);
    vel[i] = 2.0 * best;
    a = b;
  }
  return vel;
}

double check_homogeneous_ma(const GeodesicPath& path, const HmaeGrid& hg) {
  if (hg.ns < 3 || !(hg.t_step > 0) || !(hg.t_max > hg.t_min))
    throw DomainError("check_homogeneous_ma: bad grid");
  const UniformGrid& g = path.start().grid();
  const std::size_t stride = std::max<std::size_t>(1, std::lround(hg.t_step / g.step()));
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.count; i += stride)
    if (g.at(i) >= hg.t_min && g.at(i) <= hg.t_max) nodes.push_back(i);
  if (nodes.size() < 3) throw DomainError("check_homogeneous_ma: fewer than three t-nodes");
  const std::size_t nt = nodes.size();
  const double hs = 1.0 / static_cast<double>(hg.ns - 1);
  const double ht = g.step() * static_cast<double>(stride);
  std::vector<std::vector<double>> U(hg.ns, std::vector<double>(nt));
  for (std::size_t a = 0; a < hg.ns; ++a) {
    const double s = a + 1 == hg.ns ? 1.0 : static_cast<double>(a) * hs;
    const auto w = path.sample(s);
    for (std::size_t b = 0; b < nt; ++b) U[a][b] = w.values()[nodes[b]];
  }
  double worst = 0.0;
  for (std::size_t a = 1; a + 1 < hg.ns; ++a) {
    for (std::size_t b = 1; b + 1 < nt; ++b) {
      const double uss = (U[a + 1][b] - 2 * U[a][b] + U[a - 1][b]) / (hs * hs);
      const double utt = (U[a][b + 1] - 2 * U[a][b] + U[a][b - 1]) / (ht * ht);
      const double ust = (U[a + 1][b + 1] - U[a + 1][b - 1] - U[a - 1][b + 1] + U[a - 1][b - 1]) / (4 * hs * ht);
      const double det = uss * utt - ust * ust;
      const double norm = std::sqrt(uss * uss + utt * utt + 2 * ust * ust);
      worst = std::max(worst, std::abs(det) / (1.0 + norm));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Gateaux checks

GateauxReport gateaux_check(const std::function<double(const ToricWeight&)>& F, const ToricWeight& u,
                            std::span<const double> v, const Measure1D& derivative,
                            const std::vector<double>& steps) {
  if (v.size() != u.values().size()) throw DomainError("gateaux_check: direction/grid size mismatch");
  if (steps.empty()) throw DomainError("gateaux_check: no steps");
  GateauxReport r;
  r.steps = steps;
  r.pairing = derivative.integrate_samples(v);
  const double F0 = F(u);
  for (double tau : steps) {
    GridFunction f = u.as_grid_function();
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += 0.5 * tau * v[i];
    ToricWeight ut = [&] {
      try {
        return psh_project(f, u.degree());
      } catch (const DomainError&) {
        throw DomainError("gateaux_check: direction makes the perturbation inadmissible");
      }
    }();
    const double q = (F(ut) - F0) / tau;
    r.quotients.push_back(q);
    r.residuals.push_back(std::abs(q - r.pairing));
  }
  if (steps.size() >= 2) {
    const std::size_t n = steps.size();
    r.order = std::log(r.residuals[n - 2] / r.residuals[n - 1]) / std::log(steps[n - 2] / steps[n - 1]);
  } else {
    r.order = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

GateauxReport gateaux_check_energy(const ToricWeight& u, const ToricWeight& u0, std::span<const double> v,
                                   const std::vector<double>& steps) {
  return gateaux_check([&](const ToricWeight& w) { return energy_direct(w, u0); }, u, v, monge_ampere(u),
                       steps);
}

std::string measure_csv(const Measure1D& mu) {
  std::string out = "t,density,atom_mass\n";
  char buf[96];
  for (std::size_t i = 0; i < mu.density.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,0\n", mu.grid.at(i), mu.density[i]);
    out += buf;
  }
  for (const auto& a : mu.atoms) {
    std::snprintf(buf, sizeof buf, "%.17g,0,%.17g\n", a.location, a.mass);
    out += buf;
  }
  return out;
}

}  // namespace toriclab
