#include "setzer/bsd.hpp"

#include <algorithm>
#include <cmath>

#include "setzer/errors.hpp"
#include "setzer/periods.hpp"

namespace setzer {

namespace {

constexpr double kRoundingTolerance = 0.01;
constexpr double kZeroThreshold = 0.5;
constexpr int kMaxRetries = 3;

}  // namespace

bool is_perfect_square(i64 v) {
  if (v < 0) return false;
  u64 r = arith::isqrt(static_cast<u64>(v));
  return static_cast<i64>(r * r) == v;
}

ShaResult analytic_sha(const CurveParams& params, const EvalOptions& opts,
                       ApCache* cache) {
  if (params.cls != CurveClass::Star && params.cls != CurveClass::DoubleStar)
    throw SetzerError(Err::WrongSign,
                      "analytic_sha: even-sign classes only", params.u);

  const PeriodResult period = real_period(params.u);
  const dd omega = ddops::from_f128(period.omega_q);

  EvalOptions eval = opts;
  ShaResult res;
  for (int attempt = 0;; ++attempt) {
    LValueResult l = l_at_1(params, eval, cache);
    dd raw1_dd = ddops::div(ddops::mul(dd{l.value, 0.0}, 2.0), omega);
    double raw1 = raw1_dd.to_double();
    double raw2 = std::ldexp(raw1, -(params.k - 1));

    res.raw1 = raw1;
    res.raw2 = raw2;
    res.lvalue = l.value;
    res.omega = period.omega;
    res.tail_bound = l.tail_bound;
    res.terms_used = l.terms_used;
    res.retries = attempt;

    if (raw1 < kZeroThreshold) {
      res.is_zero = true;
      res.sha1 = 0;
      res.sha2 = 0;
      res.square1 = true;
      res.square2 = true;
      res.rounding_error = 0;
      res.anomaly = Anomaly::None;
      return res;
    }

    res.is_zero = false;
    res.sha1 = std::llround(raw1);
    res.sha2 = std::llround(raw2);
    res.rounding_error = std::max(std::fabs(raw1 - res.sha1),
                                  std::fabs(raw2 - res.sha2));
    if (res.rounding_error < kRoundingTolerance) {
      res.anomaly = Anomaly::None;
      break;
    }
    if (attempt == kMaxRetries) {
      res.anomaly = Anomaly::Precision;
      break;
    }
    eval.term_multiplier *= 2;
    eval.precision_bits += 32;
  }

  res.square1 = is_perfect_square(res.sha1);
  res.square2 = is_perfect_square(res.sha2);
  if (res.anomaly == Anomaly::None && (!res.square1 || !res.square2))
    res.anomaly = Anomaly::NonSquare;
  if (res.anomaly != Anomaly::Precision)
    res.certified_odd_primes = certify(params, res.sha1, res.sha2, cache);
  return res;
}

RankOneResult rank_one_product(const CurveParams& params,
                               const EvalOptions& opts, ApCache* cache) {
  if (params.cls != CurveClass::EvenK)
    throw SetzerError(Err::WrongSign,
                      "rank_one_product: odd-sign class only", params.u);
  const PeriodResult period = real_period(params.u);
  LValueResult l = lprime_at_1(params, opts, cache);

  RankOneResult res;
  res.lprime = l.value;
  res.omega = period.omega;
  res.tail_bound = l.tail_bound;
  res.terms_used = l.terms_used;
  res.sha_times_reg1 =
      ddops::div(ddops::mul(dd{l.value, 0.0}, 2.0),
                 ddops::from_f128(period.omega_q))
          .to_double();
  return res;
}

bool good_ordinary(i64 u, u64 p, ApCache* cache) {
  if (p < 3) throw SetzerError(Err::Usage, "good_ordinary: p must be >= 3", u);
  u128 n = static_cast<u128>(static_cast<i128>(u) * u) + 64;
  if (n % p == 0) return false;
  i64 a = cache ? cache->ap(u, p, n) : ap(u, p);
  i64 r = a % static_cast<i64>(p);
  return r != 0;
}

std::vector<u64> certify(const CurveParams& params, i64 sha1, i64 sha2,
                         ApCache* cache, u64 report_bound) {
  std::vector<u64> primes;
  i64 product = sha1;  // sha1 and sha2 share the same odd part
  if (product > 1) {
    auto fac = arith::factorize(static_cast<u128>(product));
    for (u128 p : fac.primes) {
      if (p == 2) continue;
      primes.push_back(static_cast<u64>(p));
    }
  }
  (void)sha2;
  if (report_bound >= 3) {
    auto snapshot = arith::small_primes(report_bound);
    for (u64 p : *snapshot) {
      if (p < 3) continue;
      if (p > report_bound) break;
      primes.push_back(p);
    }
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  std::vector<u64> certified;
  for (u64 p : primes) {
    if (good_ordinary(params.u, p, cache)) certified.push_back(p);
  }
  return certified;
}

}  // namespace setzer
