#pragma once

// Special values of Dedekind zeta functions of real quadratic fields and the
// k^3/6 slope constant for arithmetic degrees of Hilbert cusp-form lattices.

#include <cstdint>
#include <string>
#include <vector>

namespace toriclab {

/// Exact rational with 64-bit parts; arithmetic throws on overflow.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1);

  [[nodiscard]] double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  [[nodiscard]] std::string str() const;  // "p/q", or "p" when q = 1

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
};

/// Bernoulli numbers B_0..B_n (B_1 = -1/2).
std::vector<Rational> bernoulli_numbers(int n);

/// Positive squarefree D = 1 mod 4, D > 1; throws DomainError otherwise.
void validate_discriminant(std::int64_t D);

/// Jacobi symbol (a/n) for odd n > 0.
int jacobi(std::int64_t a, std::int64_t n);
/// Quadratic character of Q(sqrt D): chi_D(n) = (n/D).
int kronecker_chi(std::int64_t D, std::int64_t n);

/// zeta_F(-1) from Siegel's divisor sum.
Rational zeta_F_minus1(std::int64_t D);
/// L(-1, chi_D) = -B_{2,chi}/2, exact.
Rational l_minus1(std::int64_t D);

struct SeriesValue {
  double value = 0.0;
  double derivative = 0.0;  // d/ds
  double error_bound = 0.0;
};

/// Hurwitz zeta(s, a) and its s-derivative by Euler-Maclaurin with N summed
/// terms and p Bernoulli corrections. Valid for s != 1, a > 0.
SeriesValue hurwitz_zeta(double s, double a, int N = 16, int p = 8);

/// zeta'(-1) by Euler-Maclaurin.
double zeta_prime_minus1(int N = 16);
/// zeta'(-1) / zeta(-1).
double zeta_log_derivative_minus1(int N = 16);

/// L(2, chi_D), L'(2, chi_D) through Hurwitz values at a/D; throws
/// ContractError when the error bound exceeds 1e-10.
SeriesValue l_at_2(std::int64_t D, int N = 16);

/// zeta_F(-1) = D^{3/2} L(2, chi_D) / (24 pi^2) through the functional equation.
double zeta_F_numeric(std::int64_t D, int N = 16);

/// zeta_F'(-1) = zeta'(-1) L(-1) + zeta(-1) L'(-1).
double zeta_F_prime_minus1(std::int64_t D, int N = 16);

/// |SL_2(O_F / ell O_F)|, exact.
std::int64_t congruence_index(std::int64_t D, std::int64_t ell);
std::int64_t euler_phi(std::int64_t n);
/// True when ell = N M with gcd(N, M) = 1 and N, M >= 3.
bool has_coprime_split(std::int64_t ell);

struct HilbertConstant {
  std::int64_t D = 0;
  std::int64_t ell = 0;
  Rational zeta_F_m1;
  double zeta_F_prime_m1 = 0.0;
  double zeta_F_log_derivative = 0.0;  // zeta_F'(-1)/zeta_F(-1)
  double zeta_log_derivative = 0.0;    // zeta'(-1)/zeta(-1)
  double bracket = 0.0;
  std::int64_t d_ell = 0;
  double slope = 0.0;
  double k3_coefficient = 0.0;  // slope / 6
  std::string warning;
};

HilbertConstant hilbert_slope(std::int64_t D, std::int64_t ell, int N = 16);

}  // namespace toriclab
