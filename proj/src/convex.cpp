#include "toriclab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace toriclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// 1 / (1 + e^-x)
double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double convex_tolerance(double scale) { return 1e-10 * scale; }

double scale_of(std::span<const double> v) {
  double s = 1.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Slope of the left tail just left of t_min, for raw tail data.
double tail_start_slope(double left_slope, double first_value, double t_min,
                        const std::optional<SingularTail>& tail) {
  if (!tail) return left_slope;
  const double sing = left_slope - tail->epsilon * loglog_profile_d1(t_min);
  if (tail->floor && tail->floor->value >= first_value) return tail->floor->slope;
  return sing;
}

}  // namespace

double loglog_profile(double t) { return std::log1p(softplus(-t)); }

double loglog_profile_d1(double t) {
  const double h = softplus(-t);
  return -logistic(-t) / (1.0 + h);
}

double loglog_profile_d2(double t) {
  const double h = softplus(-t);
  const double hp = -logistic(-t);
  const double hpp = logistic(t) * logistic(-t);
  return (hpp * (1.0 + h) - hp * hp) / ((1.0 + h) * (1.0 + h));
}

// ---------------------------------------------------------------------------
// UniformGrid

UniformGrid UniformGrid::symmetric(double half_width, std::size_t cells) {
  return UniformGrid{-half_width, half_width, cells + 1};
}

double UniformGrid::at(std::size_t i) const {
  if (i + 1 == count) return t_max;
  return t_min + step() * static_cast<double>(i);
}

std::vector<double> UniformGrid::points() const {
  std::vector<double> p(count);
  for (std::size_t i = 0; i < count; ++i) p[i] = at(i);
  return p;
}

std::vector<double> UniformGrid::trapezoid_weights() const {
  std::vector<double> w(count, step());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// ---------------------------------------------------------------------------
// ToricWeight

ToricWeight::ToricWeight(int degree_m, UniformGrid grid, std::vector<double> values,
                         double left_slope, double right_slope,
                         std::optional<SingularTail> singular_tail)
    : m_(degree_m),
      grid_(grid),
      values_(std::move(values)),
      left_slope_(left_slope),
      right_slope_(right_slope),
      tail_(std::move(singular_tail)) {
  if (m_ < 1) throw DomainError("ToricWeight: degree m must be >= 1");
  if (grid_.count < 17) throw DomainError("ToricWeight: grid needs at least 16 cells");
  if (!(grid_.t_max > grid_.t_min) || !std::isfinite(grid_.t_min) || !std::isfinite(grid_.t_max))
    throw DomainError("ToricWeight: invalid grid extent");
  if (values_.size() != grid_.count) throw DomainError("ToricWeight: values/grid size mismatch");
  if (!all_finite(values_) || !std::isfinite(left_slope_) || !std::isfinite(right_slope_))
    throw DomainError("ToricWeight: non-finite data");
  const double m = m_;
  const double eps_slope = 1e-12 * (1.0 + m);
  if (left_slope_ < -eps_slope || right_slope_ > m + eps_slope || left_slope_ > right_slope_ + eps_slope)
    throw DomainError("ToricWeight: slopes must satisfy 0 <= left <= right <= m");
  if (tail_) {
    if (!(tail_->epsilon >= 0) || !std::isfinite(tail_->epsilon))
      throw DomainError("ToricWeight: singular epsilon must be >= 0");
    if (tail_->floor) {
      if (std::abs(tail_->floor->slope - left_slope_) > eps_slope)
        throw DomainError("ToricWeight: tail floor slope must equal the left slope");
      if (tail_->floor->value > values_.front() + convex_tolerance(value_scale()))
        throw DomainError("ToricWeight: tail floor lies above the first sample");
    }
    if (tail_->epsilon == 0 && !tail_->floor) tail_.reset();
  }

  const double tol = convex_tolerance(value_scale());
  const double h = grid_.step();
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
    const double d2 = values_[i + 1] - 2 * values_[i] + values_[i - 1];
    if (d2 < -8 * tol) {
      std::ostringstream os;
      os << "ToricWeight: not convex at t=" << grid_.at(i) << " (second difference " << d2 << ")";
      throw DomainError(os.str());
    }
  }
  const double slope_tol = 8 * tol / h;
  const double d_first = (values_[1] - values_[0]) / h;
  const double d_last = (values_.back() - values_[values_.size() - 2]) / h;
  if (left_tail_slope_at_start() > d_first + slope_tol)
    throw DomainError("ToricWeight: left tail slope exceeds first divided difference");
  if (d_last > right_slope_ + slope_tol)
    throw DomainError("ToricWeight: last divided difference exceeds right slope");
}

double ToricWeight::value_scale() const { return scale_of(values_); }

bool ToricWeight::has_minimal_singularities() const {
  const double eps = 1e-12 * (1.0 + m_);
  if (is_singular()) return false;
  return std::abs(left_slope_) <= eps && std::abs(right_slope_ - m_) <= eps;
}

double ToricWeight::left_tail_value(double t) const {
  const double t0 = grid_.t_min;
  const double affine = values_.front() + left_slope_ * (t - t0);
  if (!tail_) return affine;
  double v = affine - tail_->epsilon * (loglog_profile(t) - loglog_profile(t0));
  if (tail_->floor) v = std::max(v, tail_->floor->value + tail_->floor->slope * (t - t0));
  return v;
}

double ToricWeight::left_tail_derivative(double t) const {
  if (!tail_) return left_slope_;
  if (tail_->floor && t <= floor_crossing()) return tail_->floor->slope;
  return left_slope_ - tail_->epsilon * loglog_profile_d1(t);
}

double ToricWeight::left_tail_slope_at_start() const {
  return tail_start_slope(left_slope_, values_.front(), grid_.t_min, tail_);
}

double ToricWeight::floor_crossing() const {
  if (!tail_ || !tail_->floor) return -kInf;
  const double t0 = grid_.t_min;
  const double gap = values_.front() - tail_->floor->value;
  if (gap <= 0) return t0;
  if (tail_->epsilon <= 0) return -kInf;
  // Solve g(t) = g(t0) + gap / eps in closed form.
  const double target = loglog_profile(t0) + gap / tail_->epsilon;
  if (target > 700) return -kInf;
  const double hval = std::expm1(target);  // h(t) = log(1 + e^-t)
  if (hval > 700) return -hval;
  return -std::log(std::expm1(hval));
}

double ToricWeight::operator()(double t) const {
  const double t0 = grid_.t_min;
  const double t1 = grid_.t_max;
  if (t < t0) return left_tail_value(t);
  if (t > t1) return values_.back() + right_slope_ * (t - t1);
  const double h = grid_.step();
  const double pos = (t - t0) / h;
  std::size_t i = std::min(static_cast<std::size_t>(pos), grid_.count - 2);
  const double frac = pos - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

ToricWeight ToricWeight::shifted(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x += 0.5 * c;
  auto tail = tail_;
  if (tail && tail->floor) tail->floor->value += 0.5 * c;
  return ToricWeight(m_, grid_, std::move(v), left_slope_, right_slope_, tail);
}

std::vector<double> ToricWeight::vertex_masses() const {
  const std::size_t n = values_.size();
  const double h = grid_.step();
  std::vector<double> mass(n);
  double prev = left_tail_slope_at_start();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = (values_[i + 1] - values_[i]) / h;
    mass[i] = d - prev;
    prev = d;
  }
  mass[n - 1] = right_slope_ - prev;
  return mass;
}

GridFunction ToricWeight::as_grid_function() const {
  return GridFunction{grid_, values_, left_slope_, right_slope_, tail_};
}

// ---------------------------------------------------------------------------
// ConvexConjugate

ConvexConjugate::ConvexConjugate(std::vector<double> moment_grid, std::vector<double> dual_values)
    : x_(std::move(moment_grid)), v_(std::move(dual_values)) {
  if (x_.empty() || x_.size() != v_.size())
    throw DomainError("ConvexConjugate: knot/value size mismatch");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw DomainError("ConvexConjugate: knots must increase strictly");
}

double ConvexConjugate::operator()(double x) const {
  const double tol = 1e-12 * (1.0 + std::abs(x_.back()));
  if (x < x_.front() - tol || x > x_.back() + tol) return kInf;
  if (x_.size() == 1) return v_.front();
  x = std::clamp(x, x_.front(), x_.back());
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = it == x_.end() ? x_.size() - 1 : static_cast<std::size_t>(it - x_.begin());
  if (k == 0) k = 1;
  const double a = x_[k - 1], b = x_[k];
  const double w = (x - a) / (b - a);
  return v_[k - 1] + w * (v_[k] - v_[k - 1]);
}

double ConvexConjugate::integral() const {
  double s = 0.0;
  for (std::size_t k = 1; k < x_.size(); ++k) s += 0.5 * (v_[k] + v_[k - 1]) * (x_[k] - x_[k - 1]);
  return s;
}

ConvexConjugate legendre(const ToricWeight& u) {
  if (u.singular_tail())
    throw DomainError("legendre: weights with a singular tail have no finite-grid conjugate");
  const auto v = u.values();
  const UniformGrid& g = u.grid();
  const std::size_t n = v.size();
  const double h = g.step();

  // Vertex i maximizes t x - u(t) for x between the slopes of its two edges,
  // so u* is linear with slope t_i between consecutive edge slopes. Values are
  // accumulated from those slopes rather than recomputed per knot: nearly
  // equal knots (long hull edges) would otherwise amplify round-off into
  // spurious non-convexity.
  std::vector<double> xs;
  std::vector<double> vs;
  xs.reserve(n + 1);
  vs.reserve(n + 1);
  xs.push_back(u.left_slope());
  vs.push_back(u.left_slope() * g.at(0) - v[0]);
  auto push = [&](double x, double t) {
    if (x <= xs.back()) return;
    vs.push_back(vs.back() + t * (x - xs.back()));
    xs.push_back(x);
  };
  for (std::size_t i = 0; i + 1 < n; ++i)
    push(std::min((v[i + 1] - v[i]) / h, u.right_slope()), g.at(i));
  push(u.right_slope(), g.at(n - 1));
  return ConvexConjugate(std::move(xs), std::move(vs));
}

ToricWeight inverse_legendre(const ConvexConjugate& conj, const UniformGrid& grid, int degree_m) {
  // Work on the lower hull of the knots: for a convex conjugate this drops
  // nothing, and it keeps the scan below correct when round-off in an
  // interpolated conjugate leaves tiny non-convex wiggles.
  std::vector<double> x;
  std::vector<double> v;
  {
    const auto xs = conj.moment_grid();
    const auto vs = conj.dual_values();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      while (x.size() >= 2) {
        const std::size_t a = x.size() - 2, b = x.size() - 1;
        // Pop b when it is not strictly below the chord from a to i.
        if ((v[b] - v[a]) * (xs[i] - x[a]) >= (vs[i] - v[a]) * (x[b] - x[a])) {
          x.pop_back();
          v.pop_back();
        } else {
          break;
        }
      }
      x.push_back(xs[i]);
      v.push_back(vs[i]);
    }
  }
  const std::size_t K = x.size();
  std::vector<double> out(grid.count);
  std::size_t k = 0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double t = grid.at(i);
    while (k + 1 < K && x[k + 1] * t - v[k + 1] >= x[k] * t - v[k]) ++k;
    out[i] = x[k] * t - v[k];
  }
  return ToricWeight(degree_m, grid, std::move(out), std::max(0.0, x.front()), x.back());
}

// ---------------------------------------------------------------------------
// psh projection

ToricWeight psh_project(const GridFunction& f, int degree_m) {
  if (degree_m < 1) throw DomainError("psh_project: degree m must be >= 1");
  const std::size_t n = f.values.size();
  if (n != f.grid.count || n < 17) throw DomainError("psh_project: bad grid");
  if (!all_finite(f.values) || !std::isfinite(f.left_slope) || !std::isfinite(f.right_slope))
    throw DomainError("psh_project: non-finite input");
  if (f.singular_tail && f.left_slope < 0)
    throw DomainError("psh_project: singular tail requires a non-negative left slope");

  const double m = degree_m;
  const double start_slope =
      tail_start_slope(f.left_slope, f.values.front(), f.grid.t_min, f.singular_tail);
  const double a = std::max(0.0, start_slope);
  const double b = std::min(m, f.right_slope);
  if (f.right_slope < 0 || a > b + 1e-12 * (1.0 + m))
    throw DomainError("psh_project: tail slopes leave no admissible minorant (envelope is -inf)");

  const auto& y = f.values;
  const double tol = convex_tolerance(scale_of(y));
  const double h = f.grid.step();
  auto tp = [&](std::size_t i) { return f.grid.at(i); };

  // Lower hull, left to right. A point is dropped only when it sits above the
  // chord of its neighbours by more than tol, so admissible input is kept
  // bit-for-bit and the projection is idempotent.
  std::vector<std::size_t> hull;
  hull.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t p = hull[hull.size() - 2];
      const std::size_t q = hull.back();
      const double chord = y[p] + (y[i] - y[p]) * (tp(q) - tp(p)) / (tp(i) - tp(p));
      if (y[q] - chord > tol) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }

  const std::size_t K = hull.size() - 1;
  auto edge_slope = [&](std::size_t k) { return (y[hull[k + 1]] - y[hull[k]]) / (tp(hull[k + 1]) - tp(hull[k])); };
  const double slope_tol = tol / h;

  std::size_t left_vertex = hull[K];
  for (std::size_t k = 0; k < K; ++k)
    if (edge_slope(k) >= a - slope_tol) {
      left_vertex = hull[k];
      break;
    }
  std::size_t right_vertex = hull[0];
  for (std::size_t k = K; k-- > 0;)
    if (edge_slope(k) <= b + slope_tol) {
      right_vertex = hull[k + 1];
      break;
    }
  if (right_vertex < left_vertex) right_vertex = left_vertex;

  std::vector<double> out(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < left_vertex) {
      out[i] = y[left_vertex] + a * (tp(i) - tp(left_vertex));
    } else if (i > right_vertex) {
      out[i] = y[right_vertex] + b * (tp(i) - tp(right_vertex));
    } else {
      while (k < K && hull[k + 1] < i) ++k;
      if (hull[k] == i || k == K) {
        out[i] = y[i];
      } else if (hull[k + 1] == i) {
        out[i] = y[i];
      } else {
        const std::size_t p = hull[k], q = hull[k + 1];
        out[i] = y[p] + (y[q] - y[p]) * (tp(i) - tp(p)) / (tp(q) - tp(p));
      }
    }
  }

  auto tail = f.singular_tail;
  if (tail && tail->floor) tail->floor->value = std::min(tail->floor->value, out.front());
  const double left = std::min(std::max(0.0, f.left_slope), b);
  return ToricWeight(degree_m, f.grid, std::move(out), left, b, tail);
}

// ---------------------------------------------------------------------------
// WeightSpec / make_weight

WeightSpec WeightSpec::fubini_study(int m, double T, std::size_t G) {
  WeightSpec s;
  s.kind = Kind::FubiniStudy;
  s.degree_m = m;
  s.half_width = T;
  s.cells = G;
  return s;
}

WeightSpec WeightSpec::max_linear(int m, double T, std::size_t G) {
  WeightSpec s = fubini_study(m, T, G);
  s.kind = Kind::MaxLinear;
  return s;
}

WeightSpec WeightSpec::perturbed(const WeightSpec& base, double amplitude, double center,
                                 double width) {
  WeightSpec s = base;
  s.kind = Kind::Perturbed;
  s.amplitude = amplitude;
  s.center = center;
  s.width = width;
  s.base = std::make_shared<const WeightSpec>(base);
  return s;
}

WeightSpec WeightSpec::log_singular(const WeightSpec& base, double epsilon) {
  WeightSpec s = base;
  s.kind = Kind::LogSingular;
  s.epsilon = epsilon;
  s.base = std::make_shared<const WeightSpec>(base);
  return s;
}

WeightSpec WeightSpec::shifted(const WeightSpec& base, double c) {
  WeightSpec s = base;
  s.kind = Kind::Shifted;
  s.shift = c;
  s.base = std::make_shared<const WeightSpec>(base);
  return s;
}

ToricWeight make_weight(const WeightSpec& spec) {
  if (spec.degree_m < 1) throw DomainError("make_weight: degree m must be >= 1");
  if (spec.cells < 16) throw DomainError("make_weight: grid resolution G must be >= 16");
  if (!std::isfinite(spec.half_width) || !(spec.half_width > 0))
    throw DomainError("make_weight: grid extent T must be positive and finite");
  for (double p : {spec.amplitude, spec.center, spec.width, spec.epsilon, spec.shift})
    if (!std::isfinite(p)) throw DomainError("make_weight: non-finite parameter");

  const int m = spec.degree_m;
  const UniformGrid grid = UniformGrid::symmetric(spec.half_width, spec.cells);

  switch (spec.kind) {
    case WeightSpec::Kind::FubiniStudy: {
      std::vector<double> v(grid.count);
      for (std::size_t i = 0; i < grid.count; ++i) v[i] = 0.5 * m * softplus(2.0 * grid.at(i));
      return ToricWeight(m, grid, std::move(v), 0.0, m);
    }
    case WeightSpec::Kind::MaxLinear: {
      std::vector<double> v(grid.count);
      for (std::size_t i = 0; i < grid.count; ++i) v[i] = m * std::max(0.0, grid.at(i));
      return ToricWeight(m, grid, std::move(v), 0.0, m);
    }
    case WeightSpec::Kind::Perturbed: {
      if (!spec.base) throw DomainError("make_weight: perturbed spec without base");
      if (!(spec.width > 0)) throw DomainError("make_weight: bump width must be positive");
      GridFunction f = make_weight(*spec.base).as_grid_function();
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double z = (f.grid.at(i) - spec.center) / spec.width;
        f.values[i] += spec.amplitude * std::exp(-z * z);
      }
      return psh_project(f, m);
    }
    case WeightSpec::Kind::LogSingular: {
      if (!spec.base) throw DomainError("make_weight: log-singular spec without base");
      if (spec.epsilon < 0) throw DomainError("make_weight: epsilon must be >= 0");
      ToricWeight base = make_weight(*spec.base);
      if (spec.epsilon == 0) return base;
      if (base.singular_tail()) throw DomainError("make_weight: base already singular");
      GridFunction f = base.as_grid_function();
      for (std::size_t i = 0; i < f.values.size(); ++i)
        f.values[i] -= spec.epsilon * loglog_profile(f.grid.at(i));
      f.singular_tail = SingularTail{spec.epsilon, std::nullopt};
      return psh_project(f, m);
    }
    case WeightSpec::Kind::Shifted: {
      if (!spec.base) throw DomainError("make_weight: shifted spec without base");
      return make_weight(*spec.base).shifted(spec.shift);
    }
  }
  throw DomainError("make_weight: unknown kind");
}

}  // namespace toriclab
