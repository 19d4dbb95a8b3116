#pragma once

// S^1-invariant metrics on O(m) over the Riemann sphere, encoded as convex
// functions u(t) of t = log|z|. Convention: |frame|^2 = exp(-2 u(log|z|)),
// so the potential relative to a reference u0 is phi = 2 (u - u0).
//
// A ToricWeight is the piecewise-linear interpolant of its samples on a
// uniform grid, continued by affine tails (optionally with a log-log
// correction on the left tail, which models a log-singular metric at z = 0).

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toriclab {

/// Raised when an input violates a documented precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computed object fails one of its invariants.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTolFenchel = 1e-8;

struct UniformGrid {
  double t_min = -30.0;
  double t_max = 30.0;
  std::size_t count = 4097;  // samples, i.e. cells + 1

  static UniformGrid symmetric(double half_width, std::size_t cells);

  [[nodiscard]] double step() const { return (t_max - t_min) / static_cast<double>(count - 1); }
  [[nodiscard]] double at(std::size_t i) const;
  [[nodiscard]] std::size_t cells() const { return count - 1; }
  [[nodiscard]] std::vector<double> points() const;
  /// Trapezoid weights (h/2 at the ends).
  [[nodiscard]] std::vector<double> trapezoid_weights() const;

  bool operator==(const UniformGrid&) const = default;
};

/// Affine line used as a lower cap of the left tail: u(t) >= value + slope (t - t_min).
struct TailFloor {
  double value = 0.0;
  double slope = 0.0;
  bool operator==(const TailFloor&) const = default;
};

/// Left-tail correction -eps * (g(t) - g(t_min)), g(t) = log(1 + log(1 + e^-t)),
/// optionally capped from below by a floor line (bounded truncations).
struct SingularTail {
  double epsilon = 0.0;
  std::optional<TailFloor> floor;
  bool operator==(const SingularTail&) const = default;
};

/// g(t) = log(1 + log(1 + e^-t)) and its first two derivatives.
double loglog_profile(double t);
double loglog_profile_d1(double t);
double loglog_profile_d2(double t);

/// Samples plus tail data, not yet known to be convex.
struct GridFunction {
  UniformGrid grid;
  std::vector<double> values;
  double left_slope = 0.0;
  double right_slope = 0.0;
  std::optional<SingularTail> singular_tail;
};

class ToricWeight {
 public:
  /// Validates every invariant; throws DomainError on violation.
  ToricWeight(int degree_m, UniformGrid grid, std::vector<double> values, double left_slope,
              double right_slope, std::optional<SingularTail> singular_tail = std::nullopt);

  [[nodiscard]] int degree() const { return m_; }
  [[nodiscard]] const UniformGrid& grid() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double left_slope() const { return left_slope_; }
  [[nodiscard]] double right_slope() const { return right_slope_; }
  [[nodiscard]] const std::optional<SingularTail>& singular_tail() const { return tail_; }

  /// Evaluates the weight anywhere on the real line.
  [[nodiscard]] double operator()(double t) const;

  /// Bounded potential relative to any smooth reference with slopes [0, m].
  [[nodiscard]] bool has_minimal_singularities() const;
  /// Unbounded left tail (log-singular and not truncated).
  [[nodiscard]] bool is_singular() const { return tail_ && tail_->epsilon > 0 && !tail_->floor; }

  /// Left-tail helpers (t <= t_min).
  [[nodiscard]] double left_tail_value(double t) const;
  [[nodiscard]] double left_tail_derivative(double t) const;
  /// Derivative of the tail at t_min, from the left.
  [[nodiscard]] double left_tail_slope_at_start() const;
  /// Point where the floor line takes over from the singular branch
  /// (-inf when there is no floor, t_min when the floor is active at t_min).
  [[nodiscard]] double floor_crossing() const;

  /// phi -> phi + c, i.e. u -> u + c/2.
  [[nodiscard]] ToricWeight shifted(double c) const;

  /// Unnormalized curvature masses at the grid vertices (slope jumps, with
  /// the tail slopes at both ends). Sums to right_slope - left_tail_slope_at_start().
  [[nodiscard]] std::vector<double> vertex_masses() const;

  [[nodiscard]] GridFunction as_grid_function() const;

  /// Scale used by convexity tolerances.
  [[nodiscard]] double value_scale() const;

 private:
  int m_;
  UniformGrid grid_;
  std::vector<double> values_;
  double left_slope_;
  double right_slope_;
  std::optional<SingularTail> tail_;
};

/// Legendre transform u*(x) = sup_t (t x - u(t)) of a ToricWeight, exactly
/// represented as a piecewise-linear function on [left_slope, right_slope].
class ConvexConjugate {
 public:
  ConvexConjugate(std::vector<double> moment_grid, std::vector<double> dual_values);

  [[nodiscard]] std::span<const double> moment_grid() const { return x_; }
  [[nodiscard]] std::span<const double> dual_values() const { return v_; }
  [[nodiscard]] double support_min() const { return x_.front(); }
  [[nodiscard]] double support_max() const { return x_.back(); }

  /// +inf outside the finite support.
  [[nodiscard]] double operator()(double x) const;

  /// Exact integral over the support.
  [[nodiscard]] double integral() const;

 private:
  std::vector<double> x_;
  std::vector<double> v_;
};

/// Linear-time conjugate scan over the edge slopes. The weight must not
/// carry a singular tail.
ConvexConjugate legendre(const ToricWeight& u);

/// Conjugate of a piecewise-linear convex function of x, sampled on `grid`.
/// Linear time: the maximizing knot moves monotonically with t.
ToricWeight inverse_legendre(const ConvexConjugate& conj, const UniformGrid& grid, int degree_m);

/// Largest convex minorant of f whose slopes lie in [0, m] (the omega0-psh
/// projection). Throws DomainError when that envelope is -infinity.
ToricWeight psh_project(const GridFunction& f, int degree_m);

/// Weight recipes.
struct WeightSpec {
  enum class Kind { FubiniStudy, MaxLinear, Perturbed, LogSingular, Shifted };

  Kind kind = Kind::FubiniStudy;
  int degree_m = 1;
  double half_width = 30.0;  // T
  std::size_t cells = 4096;  // G
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  double epsilon = 0.0;
  double shift = 0.0;
  std::shared_ptr<const WeightSpec> base;

  static WeightSpec fubini_study(int m, double T = 30.0, std::size_t G = 4096);
  static WeightSpec max_linear(int m, double T = 30.0, std::size_t G = 4096);
  static WeightSpec perturbed(const WeightSpec& base, double amplitude, double center,
                              double width);
  static WeightSpec log_singular(const WeightSpec& base, double epsilon);
  static WeightSpec shifted(const WeightSpec& base, double c);
};

ToricWeight make_weight(const WeightSpec& spec);

}  // namespace toriclab
