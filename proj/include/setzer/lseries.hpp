#pragma once

// Dirichlet coefficients and central L-values for the conductor u^2+64
// family. Both curves of a pair are isogenous and share every a_n, so one
// evaluation serves both. Even sign: L(1) by the truncated exponential
// series. Odd sign: L'(1) by the same series with the exponential integral
// E1 as kernel.
//
// a_p paths:
//   ap_reference - O(p) quadratic-character sum (the serial reference)
//   ap_bsgs      - baby-step/giant-step group-order count, O(p^(1/4+eps))
// At bad primes a_p = chi_p(-2u) (+1 split, -1 nonsplit); at p = 2 an
// exhaustive count. ApCache fronts the good-prime paths, keyed by
// (p, u mod p) since a_p depends on u only through u mod p, folding u and
// -u together via the quadratic twist by -1.

#include <memory>
#include <vector>

#include "setzer/curves.hpp"
#include "setzer/real.hpp"

namespace setzer {

// ceil(sqrt(N) * ln(N) / 8): terms sufficient to pin the rounded orders.
u64 terms_needed(u128 n);

// Smallest M >= terms_needed(n) whose crude tail bound is below `eps`
// (|a_m| <= d(m) sqrt(m) <= sqrt(3) m on the geometric tail).
u64 effective_terms(u128 n, double eps = 1e-4);

// Trace of Frobenius shared by both curves. Dispatches to the character sum
// or BSGS by size. No caching.
i64 ap(i64 u, u64 p);

// Character-sum path for any good odd p, and the p = 2 / bad-prime rules.
i64 ap_reference(i64 u, u64 p);

// Group-order path; requires good odd p >= 17.
i64 ap_bsgs(i64 u, u64 p);

class ApCache {
 public:
  explicit ApCache(std::size_t budget_bytes = std::size_t(256) << 20);
  ~ApCache();

  // a_p for any prime p; safe for unrestricted concurrent use.
  i64 ap(i64 u, u64 p, u128 n);

  void set_enabled(bool enabled) { enabled_ = enabled; }
  u64 hits() const;
  u64 misses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  bool enabled_ = true;
};

// a_1..a_M via a linear sieve; each a_p computed exactly once, prime powers
// by the Hecke recursion, the rest multiplicatively. out[i] = a_i.
void an_stream(i64 u, u128 n, u64 m, ApCache* cache, std::vector<i32>& out);

enum class LKind { LAt1, LPrimeAt1 };

struct LValueResult {
  LKind kind = LKind::LAt1;
  double value = 0;
  u64 terms_used = 0;
  double tail_bound = 0;
  int precision_bits = 0;
};

struct EvalOptions {
  int precision_bits = 96;  // >= 96; <= 106 double-double, above __float128
  int term_multiplier = 1;  // doubled for verification / retries
};

// Even sign only (throws Err::WrongSign otherwise).
LValueResult l_at_1(const CurveParams& params, const EvalOptions& opts = {},
                    ApCache* cache = nullptr);

// Odd sign only (throws Err::WrongSign otherwise).
LValueResult lprime_at_1(const CurveParams& params,
                         const EvalOptions& opts = {},
                         ApCache* cache = nullptr);

// Exponential integral E1(x), x > 0; power series for x <= 1, continued
// fraction beyond, relative error well under 1e-12.
f128 expint_e1_q(f128 x);
double expint_e1(double x);

}  // namespace setzer
