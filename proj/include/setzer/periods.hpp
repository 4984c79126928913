#pragma once

// Least positive real period of the Neron differential via the
// arithmetic-geometric mean. The completed-square cubic for the first curve
// is x^3 + (u/4) x^2 - x with closed-form real roots, and the second curve
// shares the same period.

#include "setzer/arith.hpp"
#include "setzer/real.hpp"

namespace setzer {

struct PeriodResult {
  double omega = 0;         // least positive real period
  double e1 = 0, e2 = 0, e3 = 0;  // descending real roots of the cubic
  int agm_iterations = 0;
  int precision_bits = 113;
  f128 omega_q = 0;         // full-precision value of omega
};

// Throws Err::BadResidue unless u = 1 mod 4, Err::NoConvergence if the AGM
// fails to contract within 64 iterations.
PeriodResult real_period(i64 u);

// 2*Omega for curve 1, Omega for curve 2.
double c_infty(i64 u, int curve_index);

// AGM kernel, exposed for tests.
f128 agm(f128 a, f128 b, int* iterations = nullptr);

}  // namespace setzer
