#pragma once

// Analytic orders of the Tate-Shafarevich groups from L-values and periods:
//   |Sha(E1)| = 2 L(1) / Omega        (raw1)
//   |Sha(E2)| = L(1) / (2^(k-2) Omega) = raw1 / 2^(k-1)   (raw2)
// plus zero detection, squareness checks, and the good-ordinary
// certification of odd p-parts.

#include <vector>

#include "setzer/curves.hpp"
#include "setzer/lseries.hpp"

namespace setzer {

enum class Anomaly { None, Precision, NonSquare, VerifyTerms };

struct ShaResult {
  double raw1 = 0;  // 2 L(1) / Omega
  double raw2 = 0;  // raw1 / 2^(k-1)
  i64 sha1 = 0;
  i64 sha2 = 0;
  bool is_zero = false;
  bool square1 = true;
  bool square2 = true;
  std::vector<u64> certified_odd_primes;
  double rounding_error = 0;
  Anomaly anomaly = Anomaly::None;
  // Evaluation context carried along for records and reports.
  double lvalue = 0;
  double omega = 0;
  double tail_bound = 0;
  u64 terms_used = 0;
  int retries = 0;
};

struct RankOneResult {
  double lprime = 0;
  double sha_times_reg1 = 0;  // 2 L'(1) / Omega
  double omega = 0;
  double tail_bound = 0;
  u64 terms_used = 0;
};

// Even sign only. Rounds to integer orders with automatic escalation
// (double the terms, widen the precision, up to 3 retries); a persistent
// gap is reported as Anomaly::Precision, never dropped.
ShaResult analytic_sha(const CurveParams& params, const EvalOptions& opts = {},
                       ApCache* cache = nullptr);

// Odd sign only: the product |Sha| R(E1) under the rank-one formula.
RankOneResult rank_one_product(const CurveParams& params,
                               const EvalOptions& opts = {},
                               ApCache* cache = nullptr);

// p >= 3: true iff p does not divide the conductor and p does not divide a_p.
bool good_ordinary(i64 u, u64 p, ApCache* cache = nullptr);

// Ascending odd primes whose p-part is certified unconditional: divisors of
// sha1*sha2 passing good_ordinary, plus every good-ordinary odd prime up to
// report_bound when one is configured.
std::vector<u64> certify(const CurveParams& params, i64 sha1, i64 sha2,
                         ApCache* cache = nullptr, u64 report_bound = 0);

bool is_perfect_square(i64 v);

}  // namespace setzer
