#pragma once

// Extended-precision reals for the series accumulations: double-double
// (~106 mantissa bits) as the workhorse, __float128 (113 bits) as the
// escalation path. Requires -ffp-contract=off; the error-free transforms
// below assume mul and sub are individually rounded.

#include <cmath>
#include <quadmath.h>

namespace setzer {

using f128 = __float128;

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  constexpr dd(double h, double l) : hi(h), lo(l) {}
  constexpr dd(double h) : hi(h), lo(0.0) {}

  double to_double() const { return hi + lo; }
};

namespace ddops {

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

// Dekker splitting; exact product of two doubles as hi + lo.
inline dd two_prod(double a, double b) {
  constexpr double split = 134217729.0;  // 2^27 + 1
  double p = a * b;
  double ca = split * a;
  double ahi = ca - (ca - a);
  double alo = a - ahi;
  double cb = split * b;
  double bhi = cb - (cb - b);
  double blo = b - bhi;
  double err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
  return {p, err};
}

inline dd add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  dd t = two_sum(a.lo, b.lo);
  double lo = s.lo + t.hi;
  dd r = quick_two_sum(s.hi, lo);
  lo = r.lo + t.lo;
  return quick_two_sum(r.hi, lo);
}

inline dd add(dd a, double b) {
  dd s = two_sum(a.hi, b);
  double lo = s.lo + a.lo;
  return quick_two_sum(s.hi, lo);
}

inline dd sub(dd a, dd b) { return add(a, dd{-b.hi, -b.lo}); }

inline dd mul(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, lo);
}

inline dd mul(dd a, double b) {
  dd p = two_prod(a.hi, b);
  double lo = p.lo + a.lo * b;
  return quick_two_sum(p.hi, lo);
}

inline dd div(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = sub(a, mul(b, q1));
  double q2 = r.hi / b.hi;
  r = sub(r, mul(b, q2));
  double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return add(q, q3);
}

inline dd div(dd a, double b) { return div(a, dd{b, 0.0}); }

inline dd from_f128(f128 x) {
  double hi = static_cast<double>(x);
  double lo = static_cast<double>(x - static_cast<f128>(hi));
  return {hi, lo};
}

inline f128 to_f128(dd a) {
  return static_cast<f128>(a.hi) + static_cast<f128>(a.lo);
}

}  // namespace ddops

// Uniform interface used by the templated series evaluators.
template <class R>
struct RealOps;

template <>
struct RealOps<dd> {
  static dd from_f128(f128 x) { return ddops::from_f128(x); }
  static dd zero() { return {}; }
  static dd add(dd a, dd b) { return ddops::add(a, b); }
  static dd mul(dd a, dd b) { return ddops::mul(a, b); }
  static dd mul_double(dd a, double b) { return ddops::mul(a, b); }
  static dd div_u64(dd a, unsigned long long n) {
    return ddops::div(a, static_cast<double>(n));
  }
  static double to_double(dd a) { return a.to_double(); }
  static constexpr int mantissa_bits = 106;
};

template <>
struct RealOps<f128> {
  static f128 from_f128(f128 x) { return x; }
  static f128 zero() { return 0; }
  static f128 add(f128 a, f128 b) { return a + b; }
  static f128 mul(f128 a, f128 b) { return a * b; }
  static f128 mul_double(f128 a, double b) { return a * static_cast<f128>(b); }
  static f128 div_u64(f128 a, unsigned long long n) {
    return a / static_cast<f128>(n);
  }
  static double to_double(f128 a) { return static_cast<double>(a); }
  static constexpr int mantissa_bits = 113;
};

}  // namespace setzer
