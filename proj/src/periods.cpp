#include "setzer/periods.hpp"

#include <cmath>

#include "setzer/errors.hpp"

namespace setzer {

f128 agm(f128 a, f128 b, int* iterations) {
  if (a < b) {
    f128 t = a;
    a = b;
    b = t;
  }
  const f128 eps = FLT128_EPSILON * 4;
  int iter = 0;
  while (a - b > a * eps) {
    if (++iter > 64)
      throw SetzerError(Err::NoConvergence, "agm: no contraction");
    f128 am = (a + b) / 2;
    f128 gm = sqrtq(a * b);
    a = am;
    b = gm;
    if (b > a) {
      f128 t = a;
      a = b;
      b = t;
    }
  }
  if (iterations) *iterations = iter;
  return (a + b) / 2;
}

PeriodResult real_period(i64 u) {
  i64 r = u % 4;
  if (r < 0) r += 4;
  if (r != 1)
    throw SetzerError(Err::BadResidue, "real_period: u must be 1 mod 4", u);

  const u128 n = static_cast<u128>(static_cast<i128>(u) * u) + 64;
  const f128 sqrt_n = sqrtq(static_cast<f128>(n));
  const f128 au = static_cast<f128>(u < 0 ? -u : u);

  // Roots of x^3 + (u/4) x^2 - x: zero and (-u +- sqrt(N)) / 8, written to
  // avoid cancellation for either sign of u.
  f128 e1, e3;
  if (u >= 0) {
    e1 = 8 / (sqrt_n + au);
    e3 = -(au + sqrt_n) / 8;
  } else {
    e1 = (au + sqrt_n) / 8;
    e3 = -8 / (sqrt_n + au);
  }

  // e1 - e3 = sqrt(N)/4 exactly, e1 - e2 = e1.
  PeriodResult res;
  res.omega_q = static_cast<f128>(M_PIq) /
                agm(sqrtq(sqrt_n) / 2, sqrtq(e1), &res.agm_iterations);
  res.omega = static_cast<double>(res.omega_q);
  res.e1 = static_cast<double>(e1);
  res.e2 = 0;
  res.e3 = static_cast<double>(e3);
  res.precision_bits = 113;
  return res;
}

double c_infty(i64 u, int curve_index) {
  if (curve_index != 1 && curve_index != 2)
    throw SetzerError(Err::Usage, "c_infty: curve index must be 1 or 2", u);
  double omega = real_period(u).omega;
  return curve_index == 1 ? 2 * omega : omega;
}

}  // namespace setzer
