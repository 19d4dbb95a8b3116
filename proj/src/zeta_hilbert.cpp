#include "toriclab/zeta_hilbert.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "toriclab/convex.hpp"

namespace toriclab {

namespace {

std::int64_t narrow(__int128 x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
    throw DomainError("exact arithmetic overflows 64 bits");
  return static_cast<std::int64_t>(x);
}

Rational make(__int128 n, __int128 d) {
  if (d == 0) throw DomainError("rational with zero denominator");
  if (d < 0) n = -n, d = -d;
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) n /= a, d /= a;
  Rational r;
  r.num = narrow(n);
  r.den = narrow(d);
  return r;
}

std::int64_t mul_checked(std::int64_t a, std::int64_t b) { return narrow(static_cast<__int128>(a) * b); }

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r = mul_checked(r, b);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
              static_cast<__int128>(a.den) * b.den);
}
Rational operator-(const Rational& a, const Rational& b) { return a + Rational(-b.num, b.den); }
Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}
Rational operator/(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}

std::vector<Rational> bernoulli_numbers(int n) {
  std::vector<Rational> B(n + 1);
  B[0] = Rational(1);
  for (int m = 1; m <= n; ++m) {
    // sum_{k=0}^{m} C(m+1, k) B_k = 0
    Rational s(0);
    std::int64_t c = 1;  // C(m+1, k)
    for (int k = 0; k < m; ++k) {
      s = s + Rational(c) * B[k];
      c = c * (m + 1 - k) / (k + 1);
    }
    B[m] = Rational(-1, m + 1) * s;
  }
  return B;
}

void validate_discriminant(std::int64_t D) {
  if (D <= 1 || D % 4 != 1) throw DomainError("discriminant must be > 1 and = 1 mod 4");
  for (std::int64_t p = 2; p * p <= D; ++p)
    if (D % (p * p) == 0) throw DomainError("discriminant must be squarefree");
}

int jacobi(std::int64_t a, std::int64_t n) {
  if (n <= 0 || n % 2 == 0) throw DomainError("jacobi: n must be odd and positive");
  a %= n;
  if (a < 0) a += n;
  int r = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t m8 = n % 8;
      if (m8 == 3 || m8 == 5) r = -r;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) r = -r;
    a %= n;
  }
  return n == 1 ? r : 0;
}

int kronecker_chi(std::int64_t D, std::int64_t n) { return jacobi(n, D); }

Rational zeta_F_minus1(std::int64_t D) {
  validate_discriminant(D);
  // (1/60) sum over odd b with b^2 < D of sigma_1((D - b^2)/4); b and -b both count.
  std::int64_t total = 0;
  for (std::int64_t b = 1; b * b < D; b += 2) {
    const std::int64_t n = (D - b * b) / 4;
    std::int64_t sigma = 0;
    for (std::int64_t d = 1; d * d <= n; ++d)
      if (n % d == 0) sigma += d + (d * d == n ? 0 : n / d);
    total += 2 * sigma;
  }
  return Rational(total, 60);
}

Rational l_minus1(std::int64_t D) {
  validate_discriminant(D);
  // B_{2,chi} = (1/D) sum chi(a) a^2 - sum chi(a) a.
  std::int64_t s2 = 0, s1 = 0;
  for (std::int64_t a = 1; a < D; ++a) {
    const int c = kronecker_chi(D, a);
    s2 += c * a * a;
    s1 += c * a;
  }
  const Rational b2 = Rational(s2, D) - Rational(s1);
  return Rational(-1, 2) * b2;
}

SeriesValue hurwitz_zeta(double s, double a, int N, int p) {
  if (s == 1.0) throw DomainError("hurwitz_zeta: pole at s = 1");
  if (!(a > 0)) throw DomainError("hurwitz_zeta: a must be positive");
  if (N < 1 || p < 1 || p > 10) throw DomainError("hurwitz_zeta: bad cutoff");
  static const std::vector<Rational> B = bernoulli_numbers(22);

  SeriesValue r;
  for (int n = N - 1; n >= 0; --n) {
    const double x = n + a;
    const double xs = std::pow(x, -s);
    r.value += xs;
    r.derivative -= std::log(x) * xs;
  }
  const double x = N + a, lx = std::log(x);
  const double x1 = std::pow(x, 1.0 - s);
  r.value += x1 / (s - 1.0);
  r.derivative += -lx * x1 / (s - 1.0) - x1 / ((s - 1.0) * (s - 1.0));
  const double x0 = std::pow(x, -s);
  r.value += 0.5 * x0;
  r.derivative -= 0.5 * lx * x0;

  // Term j: B_{2j}/(2j)! * (s)(s+1)...(s+2j-2) * x^{-s-2j+1}.
  auto term = [&](int j, double& val, double& der) {
    double fact = 1.0;
    for (int i = 2; i <= 2 * j; ++i) fact *= i;
    const double c = B[2 * j].to_double() / fact;
    double prod = 1.0, dprod = 0.0;
    for (int i = 0; i <= 2 * j - 2; ++i) {
      dprod = dprod * (s + i) + prod;
      prod *= s + i;
    }
    const double xp = std::pow(x, -s - 2.0 * j + 1.0);
    val = c * prod * xp;
    der = c * (dprod - prod * lx) * xp;
  };
  for (int j = 1; j <= p; ++j) {
    double v, d;
    term(j, v, d);
    r.value += v;
    r.derivative += d;
  }
  double v, d;
  term(p + 1, v, d);
  r.error_bound = std::max(std::abs(v), std::abs(d));
  return r;
}

double zeta_prime_minus1(int N) { return hurwitz_zeta(-1.0, 1.0, N).derivative; }

double zeta_log_derivative_minus1(int N) { return zeta_prime_minus1(N) / (-1.0 / 12.0); }

SeriesValue l_at_2(std::int64_t D, int N) {
  validate_discriminant(D);
  SeriesValue r;
  const double Dd = static_cast<double>(D);
  for (std::int64_t a = 1; a < D; ++a) {
    const int c = kronecker_chi(D, a);
    if (c == 0) continue;
    const SeriesValue h = hurwitz_zeta(2.0, static_cast<double>(a) / Dd, N);
    r.value += c * h.value;
    r.derivative += c * h.derivative;
    r.error_bound += h.error_bound;
  }
  // L(s) = D^{-s} sum chi(a) zeta(s, a/D).
  const double w = 1.0 / (Dd * Dd);
  r.derivative = w * r.derivative - std::log(Dd) * w * r.value;
  r.value *= w;
  r.error_bound *= w * (1.0 + std::log(Dd));
  if (r.error_bound > 1e-10) throw ContractError("L(2, chi): series did not converge at the configured cutoff");
  return r;
}

double zeta_F_numeric(std::int64_t D, int N) {
  const double Dd = static_cast<double>(D);
  return std::pow(Dd, 1.5) * l_at_2(D, N).value / (24.0 * std::numbers::pi * std::numbers::pi);
}

namespace {

// L'(-1)/L(-1) from the functional equation of the completed L-function.
double l_log_derivative_minus1(std::int64_t D, int N) {
  const SeriesValue l2 = l_at_2(D, N);
  return -std::log(static_cast<double>(D) / std::numbers::pi) + std::numbers::egamma + std::numbers::ln2 - 1.0 -
         l2.derivative / l2.value;
}

}  // namespace

double zeta_F_prime_minus1(std::int64_t D, int N) {
  const double L = l_minus1(D).to_double();
  const double dL = L * l_log_derivative_minus1(D, N);
  return zeta_prime_minus1(N) * L + (-1.0 / 12.0) * dL;
}

std::int64_t euler_phi(std::int64_t n) {
  if (n < 1) throw DomainError("euler_phi: n must be positive");
  std::int64_t r = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    r -= r / p;
  }
  if (n > 1) r -= r / n;
  return r;
}

std::int64_t congruence_index(std::int64_t D, std::int64_t ell) {
  validate_discriminant(D);
  if (ell < 1) throw DomainError("congruence_index: level must be positive");
  // For a finite local ring R with maximal ideal m and residue field k,
  // |SL_2(R)| = |m|^3 |SL_2(k)|.
  auto sl2 = [](std::int64_t q, std::int64_t m_size) {
    return mul_checked(ipow(m_size, 3), mul_checked(q, mul_checked(q - 1, q + 1)));
  };
  std::int64_t index = 1, n = ell;
  for (std::int64_t p = 2; n > 1; ++p) {
    if (p * p > n) p = n;
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    int split;  // 1 split, -1 inert, 0 ramified
    if (D % p == 0) split = 0;
    else if (p == 2) split = (D % 8 == 1) ? 1 : -1;
    else split = jacobi(D, p);
    std::int64_t local;
    if (split == 1) {
      const std::int64_t f = sl2(p, ipow(p, e - 1));
      local = mul_checked(f, f);
    } else if (split == -1) {
      local = sl2(p * p, ipow(p * p, e - 1));
    } else {
      local = sl2(p, ipow(p, 2 * e - 1));
    }
    index = mul_checked(index, local);
  }
  return index;
}

bool has_coprime_split(std::int64_t ell) {
  for (std::int64_t a = 3; a * 3 <= ell; ++a)
    if (ell % a == 0 && ell / a >= 3 && std::gcd(a, ell / a) == 1) return true;
  return false;
}

HilbertConstant hilbert_slope(std::int64_t D, std::int64_t ell, int N) {
  validate_discriminant(D);
  HilbertConstant h;
  h.D = D;
  h.ell = ell;
  h.zeta_F_m1 = zeta_F_minus1(D);
  h.zeta_F_prime_m1 = zeta_F_prime_minus1(D, N);
  h.zeta_F_log_derivative = h.zeta_F_prime_m1 / h.zeta_F_m1.to_double();
  h.zeta_log_derivative = zeta_log_derivative_minus1(N);
  h.bracket = h.zeta_F_log_derivative + h.zeta_log_derivative + 1.5 + 0.5 * std::log(static_cast<double>(D));
  h.d_ell = mul_checked(euler_phi(ell), congruence_index(D, ell));
  h.slope = -static_cast<double>(h.d_ell) * h.zeta_F_m1.to_double() * h.bracket;
  h.k3_coefficient = h.slope / 6.0;
  if (!has_coprime_split(ell))
    h.warning = "level " + std::to_string(ell) + " is not a product of coprime N, M >= 3";
  return h;
}

}  // namespace toriclab
