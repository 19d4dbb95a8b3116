#pragma once

// Brute-force oracles shared by the unit tests and the acceptance binary.

#include <vector>

namespace oracle {

// |SL_2(Z[w]/ell)| with w^2 = w + (D-1)/4, counting det = ad - bc = 1 through
// the distribution of products over pairs.
inline long sl2_order(long D, long ell) {
  const long c = ((D - 1) / 4) % ell;
  const long n = ell * ell;  // element x + y w encoded as x * ell + y
  auto mul = [&](long u, long v) {
    const long a = u / ell, b = u % ell, x = v / ell, y = v % ell;
    // (a + b w)(x + y w) = ax + b y c + (ay + bx + by) w
    const long re = (a * x + b * y * c) % ell;
    const long im = (a * y + b * x + b * y) % ell;
    return re * ell + im;
  };
  std::vector<long> count(n, 0);
  for (long u = 0; u < n; ++u)
    for (long v = 0; v < n; ++v) ++count[mul(u, v)];
  long total = 0;
  for (long z = 0; z < n; ++z) {
    // ad = z, bc = z - 1
    const long re = (z / ell + ell - 1) % ell;
    total += count[z] * count[re * ell + z % ell];
  }
  return total;
}

}  // namespace oracle
