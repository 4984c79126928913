#include "setzer/lseries.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <list>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "setzer/errors.hpp"

namespace setzer {

namespace {

constexpr u64 kCharSumMaxP = 4096;  // at or below: cached character sums
// Truncation driven well below the reporting contract so central values are
// reproducible against independent engines at 1e-8 relative.
constexpr double kTailTarget = 1e-9;
constexpr double kSqrt3 = 1.7320508075688772;

f128 to_f128(u128 v) { return static_cast<f128>(v); }

double series_tail_bound(u128 n, u64 m) {
  double c = 2.0 * M_PI / std::sqrt(static_cast<double>(to_f128(n)));
  double x = std::exp(-c);
  return 2.0 * kSqrt3 * std::exp(-c * static_cast<double>(m + 1)) / (1.0 - x);
}

}  // namespace

u64 terms_needed(u128 n) {
  long double s = sqrtl(static_cast<long double>(n));
  long double l = logl(static_cast<long double>(n));
  return static_cast<u64>(ceill(s * l / 8.0L));
}

u64 effective_terms(u128 n, double eps) {
  u64 m = terms_needed(n);
  double c = 2.0 * M_PI / std::sqrt(static_cast<double>(to_f128(n)));
  double x = std::exp(-c);
  double rhs = std::log(2.0 * kSqrt3 / (eps * (1.0 - x))) / c;
  if (rhs > 0 && static_cast<double>(m) < rhs)
    m = static_cast<u64>(std::ceil(rhs)) + 1;
  while (series_tail_bound(n, m) >= eps) m += m / 16 + 1;
  return m;
}

// ---------------------------------------------------------------------------
// Montgomery arithmetic mod an odd prime p < 2^31 and short-Weierstrass
// point operations in Jacobian coordinates, used by the BSGS order count.

namespace {

struct Mont32 {
  u32 p;
  u32 pinv;  // -p^{-1} mod 2^32
  u32 r2;    // 2^64 mod p
  u32 one;   // 2^32 mod p

  explicit Mont32(u32 p_) : p(p_) {
    u32 inv = p_;
    for (int i = 0; i < 4; ++i) inv *= 2 - p_ * inv;
    pinv = ~inv + 1;
    one = static_cast<u32>((u64(1) << 32) % p_);
    r2 = static_cast<u32>((static_cast<u128>(1) << 64) % p_);
  }
  u32 redc(u64 t) const {
    u32 m = static_cast<u32>(t) * pinv;
    u64 s = (t + static_cast<u64>(m) * p) >> 32;
    return s >= p ? static_cast<u32>(s - p) : static_cast<u32>(s);
  }
  u32 mul(u32 a, u32 b) const { return redc(static_cast<u64>(a) * b); }
  u32 sq(u32 a) const { return mul(a, a); }
  u32 to(u64 x) const { return mul(static_cast<u32>(x % p), r2); }
  u32 from(u32 a) const { return redc(a); }
  u32 add(u32 a, u32 b) const {
    u32 s = a + b;
    return s >= p ? s - p : s;
  }
  u32 sub(u32 a, u32 b) const { return a >= b ? a - b : a + p - b; }
  u32 neg(u32 a) const { return a == 0 ? 0 : p - a; }
  u32 pow(u32 a, u64 e) const {
    u32 r = one;
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u32 inv(u32 a) const { return pow(a, p - 2); }
  bool is_qr(u32 a) const { return pow(a, (p - 1) / 2) == one; }
};

// Square root mod p of a quadratic residue (Montgomery domain).
u32 tonelli(const Mont32& f, u32 a) {
  if (a == 0) return 0;
  if ((f.p & 3) == 3) return f.pow(a, (f.p + 1) / 4);
  u64 q = f.p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u32 z = 0;
  for (u64 c = 2;; ++c) {
    z = f.to(c);
    if (!f.is_qr(z)) break;
  }
  u32 m_bits = static_cast<u32>(s);
  u32 cc = f.pow(z, q);
  u32 t = f.pow(a, q);
  u32 r = f.pow(a, (q + 1) / 2);
  while (t != f.one) {
    u32 i = 0;
    u32 tt = t;
    while (tt != f.one) {
      tt = f.sq(tt);
      ++i;
    }
    u32 b = cc;
    for (u32 j = 0; j + i + 1 < m_bits; ++j) b = f.sq(b);
    m_bits = i;
    cc = f.sq(b);
    t = f.mul(t, cc);
    r = f.mul(r, b);
  }
  return r;
}

struct JPoint {
  u32 x = 0, y = 0, z = 0;  // z == 0: infinity
  bool inf() const { return z == 0; }
};

struct APoint {
  u32 x = 0, y = 0;
  bool inf = true;
};

// y^2 = x^3 + a x + b with Montgomery-domain a.
struct Curve {
  const Mont32& f;
  u32 a;

  JPoint dbl(const JPoint& pt) const {
    if (pt.inf() || pt.y == 0) return {};
    u32 xx = f.sq(pt.x);
    u32 yy = f.sq(pt.y);
    u32 yyyy = f.sq(yy);
    u32 zz = f.sq(pt.z);
    u32 s = f.sub(f.sq(f.add(pt.x, yy)), f.add(xx, yyyy));
    s = f.add(s, s);
    u32 mm = f.add(f.add(xx, xx), xx);
    mm = f.add(mm, f.mul(a, f.sq(zz)));
    u32 x3 = f.sub(f.sq(mm), f.add(s, s));
    u32 y8 = yyyy;
    for (int i = 0; i < 3; ++i) y8 = f.add(y8, y8);
    u32 y3 = f.sub(f.mul(mm, f.sub(s, x3)), y8);
    u32 z3 = f.sub(f.sq(f.add(pt.y, pt.z)), f.add(yy, zz));
    return {x3, y3, z3};
  }

  JPoint madd(const JPoint& pt, const APoint& q) const {
    if (q.inf) return pt;
    if (pt.inf()) return {q.x, q.y, f.one};
    u32 z1z1 = f.sq(pt.z);
    u32 u2 = f.mul(q.x, z1z1);
    u32 s2 = f.mul(f.mul(q.y, pt.z), z1z1);
    if (u2 == pt.x) {
      if (s2 == pt.y) return dbl(pt);
      return {};
    }
    u32 h = f.sub(u2, pt.x);
    u32 hh = f.sq(h);
    u32 i = f.add(hh, hh);
    i = f.add(i, i);
    u32 j = f.mul(h, i);
    u32 r = f.sub(s2, pt.y);
    r = f.add(r, r);
    u32 v = f.mul(pt.x, i);
    u32 x3 = f.sub(f.sq(r), f.add(j, f.add(v, v)));
    u32 y1j = f.mul(pt.y, j);
    u32 y3 = f.sub(f.mul(r, f.sub(v, x3)), f.add(y1j, y1j));
    u32 z3 = f.sub(f.sq(f.add(pt.z, h)), f.add(z1z1, hh));
    return {x3, y3, z3};
  }

  JPoint scalar_mul(u64 k, const APoint& q) const {
    JPoint r{};
    if (q.inf || k == 0) return r;
    int top = 63 - __builtin_clzll(k);
    r = {q.x, q.y, f.one};
    for (int i = top - 1; i >= 0; --i) {
      r = dbl(r);
      if ((k >> i) & 1) r = madd(r, q);
    }
    return r;
  }
};

// Normalizes points in place with one shared inversion; infinities flagged.
void batch_normalize(const Mont32& f, const std::vector<JPoint>& pts,
                     std::vector<APoint>& out) {
  size_t n = pts.size();
  out.assign(n, APoint{});
  thread_local std::vector<u32> prefix;
  prefix.assign(n, 0);
  u32 acc = f.one;
  for (size_t i = 0; i < n; ++i) {
    prefix[i] = acc;
    if (!pts[i].inf()) acc = f.mul(acc, pts[i].z);
  }
  u32 inv_acc = f.inv(acc);
  for (size_t i = n; i-- > 0;) {
    if (pts[i].inf()) continue;
    u32 zinv = f.mul(inv_acc, prefix[i]);
    inv_acc = f.mul(inv_acc, pts[i].z);
    u32 zinv2 = f.sq(zinv);
    out[i] = {f.mul(pts[i].x, zinv2), f.mul(pts[i].y, f.mul(zinv2, zinv)),
              false};
  }
}

u64 splitmix64(u64& state) {
  u64 z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// All n in [lo, lo + width) with n * P = O, complete and exact. Every match
// below compares both normalized affine coordinates, so a match proves the
// point identity it encodes; no post-verification is needed. Returns false
// if the candidate set exploded (tiny point order).
bool bsgs_solutions(const Curve& ec, const APoint& point, u64 lo, u64 width,
                    std::vector<u64>& out) {
  const Mont32& f = ec.f;
  out.clear();

  JPoint q = ec.scalar_mul(lo, point);
  JPoint t{};
  if (!q.inf()) t = {q.x, f.neg(q.y), q.z};  // t = -(lo * P)

  u64 baby_count = 1;
  while (baby_count * baby_count < width) ++baby_count;

  // Babies s*P for s = 0..baby_count (the last one is the giant stride).
  thread_local std::vector<JPoint> jbabies;
  jbabies.assign(baby_count + 1, JPoint{});
  JPoint run = {point.x, point.y, f.one};
  for (u64 s = 1; s <= baby_count; ++s) {
    jbabies[s] = run;
    run = ec.madd(run, point);
  }
  thread_local std::vector<APoint> babies;
  batch_normalize(f, jbabies, babies);

  thread_local std::vector<u64> zero_babies;  // s >= 1 with s*P = O
  zero_babies.clear();
  for (u64 s = 1; s < baby_count; ++s)
    if (babies[s].inf) zero_babies.push_back(s);

  // Sorted x-coordinate index over babies 1..baby_count-1.
  thread_local std::vector<std::pair<u32, u32>> index;
  index.clear();
  for (u64 s = 1; s < baby_count; ++s)
    if (!babies[s].inf) index.emplace_back(babies[s].x, static_cast<u32>(s));
  std::sort(index.begin(), index.end());

  APoint stride = babies[baby_count];
  APoint neg_stride = stride;
  if (!neg_stride.inf) neg_stride.y = f.neg(neg_stride.y);

  u64 giant_count = (width - 1) / baby_count + 1;
  thread_local std::vector<JPoint> jgiants;
  jgiants.assign(giant_count, JPoint{});
  JPoint g = t;
  for (u64 i = 0; i < giant_count; ++i) {
    jgiants[i] = g;
    g = ec.madd(g, neg_stride);
  }
  thread_local std::vector<APoint> giants;
  batch_normalize(f, jgiants, giants);

  // j = i*b + s solves j*P = -(lo*P) exactly when s*P = T_i (both
  // coordinates equal); j = i*b - s exactly when s*P = -T_i. A 2-torsion
  // baby (y = 0) satisfies both through neg(0) = 0.
  auto push_j = [&](u64 ib, u64 s, bool plus) {
    u64 j;
    if (plus) {
      j = ib + s;
    } else {
      if (s > ib) return;
      j = ib - s;
    }
    if (j < width) out.push_back(j);  // shifted by lo after dedupe
  };
  for (u64 i = 0; i < giant_count; ++i) {
    u64 ib = i * baby_count;
    if (giants[i].inf) {
      push_j(ib, 0, true);
      for (u64 s : zero_babies) push_j(ib, s, true);
      continue;
    }
    auto it = std::lower_bound(index.begin(), index.end(),
                               std::make_pair(giants[i].x, u32(0)));
    for (; it != index.end() && it->first == giants[i].x; ++it) {
      u64 s = it->second;
      if (babies[s].y == giants[i].y) push_j(ib, s, true);
      if (f.neg(babies[s].y) == giants[i].y) push_j(ib, s, false);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() > 64) {
    out.clear();
    return false;
  }
  for (u64& j : out) j += lo;
  return true;
}

i64 char_sum_ap(u64 r, u64 p, const std::int8_t* chi);

// Group order of y^2 = x^3 + (r/4) x^2 - x over F_p for the residue class
// r = u mod p; requires good odd p > kCharSumMaxP.
i64 ap_bsgs_residue(u64 r, u64 p) {
  if (p >= (u64(1) << 31)) {
    // Outside the 32-bit Montgomery domain; the O(p) path stays correct.
    auto chi = arith::residue_table(p);
    return char_sum_ap(r, p, chi.data());
  }
  Mont32 f(static_cast<u32>(p));
  // Shift x by A/3 to a short model: a = B - A t, b = C - t B + 2 t^3 with
  // t = A/3, A = r/4, B = -1, C = 0.
  u32 inv4 = f.inv(f.to(4));
  u32 inv3 = f.inv(f.to(3));
  u32 A = f.mul(f.to(r), inv4);
  u32 t = f.mul(A, inv3);
  u32 B = f.neg(f.one);
  u32 a = f.sub(B, f.mul(A, t));
  u32 t3 = f.mul(f.sq(t), t);
  u32 b = f.sub(f.add(t3, t3), f.mul(t, B));

  Curve ec{f, a};
  u64 two_sqrt = arith::isqrt(4 * p);
  u64 lo = p + 1 - two_sqrt;
  u64 hi = p + 1 + two_sqrt;
  // The rational 2-torsion point survives every good reduction, so the
  // order is even; search n = 2j via the doubled point, halving the window.
  u64 n0 = lo + (lo & 1);
  u64 half_lo = n0 / 2;
  u64 half_width = (hi - n0) / 2 + 1;

  u64 rng = (p << 20) ^ r ^ 0xdb1f29f6b72c6207ull;
  u64 known = 2;
  std::vector<u64> candidates;
  for (int tries = 0; tries < 24; ++tries) {
    u64 xr = splitmix64(rng) % p;
    u32 x = f.to(xr);
    u32 fx = f.add(f.mul(f.add(f.sq(x), a), x), b);
    if (fx == 0 || !f.is_qr(fx)) continue;
    APoint point{x, tonelli(f, fx), false};
    JPoint doubled = ec.dbl({point.x, point.y, f.one});
    if (doubled.inf()) continue;
    u32 zinv = f.inv(doubled.z);
    u32 zinv2 = f.sq(zinv);
    APoint twice{f.mul(doubled.x, zinv2),
                 f.mul(doubled.y, f.mul(zinv2, zinv)), false};
    if (!bsgs_solutions(ec, twice, half_lo, half_width, candidates)) continue;
    if (candidates.empty()) continue;  // defensive; the true order qualifies
    for (u64& c : candidates) c *= 2;  // back to orders n = 2j
    if (candidates.size() == 1) {
      u64 order = candidates[0];
      return static_cast<i64>(p) + 1 - static_cast<i64>(order);
    }
    u64 d = candidates[1] - candidates[0];
    for (size_t i = 2; i < candidates.size(); ++i)
      d = std::min(d, candidates[i] - candidates[i - 1]);
    known = known / arith::gcd(known, d) * d;  // even: d = 2 ord(2P)
    u64 first = (n0 + known - 1) / known * known;
    if (first <= hi && first + known > hi) {
      return static_cast<i64>(p) + 1 - static_cast<i64>(first);
    }
  }
  // Tiny-exponent group or bad luck; fall back to the O(p) reference.
  auto chi = arith::residue_table(p);
  return char_sum_ap(r, p, chi.data());
}

// Exhaustive count over F_2 on the long model (good reduction at 2).
i64 ap_two(i64 u) {
  i64 a2 = (u - 1) / 4;
  u64 c2 = static_cast<u64>(a2 & 1);
  // y^2 + xy = x^3 + a2 x^2 - x mod 2
  int count = 1;  // infinity
  for (u64 x = 0; x < 2; ++x)
    for (u64 y = 0; y < 2; ++y) {
      u64 lhs = (y * y + x * y) & 1;
      u64 rhs = (x * x * x + c2 * x * x + x) & 1;  // -1 = +1 mod 2
      if (lhs == rhs) ++count;
    }
  return 3 - count;
}

// -sum_x chi(x^3 + (r/4) x^2 - x) by constant third differences.
i64 char_sum_ap(u64 r, u64 p, const std::int8_t* chi) {
  u64 inv4 = arith::powmod(4, p - 2, p);
  u64 a = arith::mulmod(r % p, inv4, p);
  u64 v = 0;             // f(0)
  u64 d1 = a;            // f(1) - f(0) = 1 + A - 1
  u64 d2 = (6 + 2 * a) % p;
  i64 sum = 0;
  for (u64 x = 0; x < p; ++x) {
    sum += chi[v];
    v += d1;
    if (v >= p) v -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += 6;
    if (d2 >= p) d2 -= p;
  }
  return -sum;
}

u64 residue_of(i64 u, u64 p) {
  i64 r = u % static_cast<i64>(p);
  if (r < 0) r += static_cast<i64>(p);
  return static_cast<u64>(r);
}

bool divides_conductor(i64 u, u64 p, u128 n) {
  if (n != 0) return n % p == 0;
  u128 nn = static_cast<u128>(static_cast<i128>(u) * u) + 64;
  return nn % p == 0;
}

// Multiplicative reduction at p | u^2+64: the node sits at x = -u/8 with
// tangent slopes rational exactly when -2u is a square mod p, so
// a_p = chi_p(-2u). The product over all bad primes is the Jacobi symbol
// (2u | N) = +1 (N = 1 mod 8, u = 1 mod 4), which keeps the root number at
// (-1)^(k+1).
i64 ap_bad(i64 u, u64 p) { return arith::legendre(-2 * u, p); }

}  // namespace

i64 ap_reference(i64 u, u64 p) {
  if (p == 2) return ap_two(u);
  if (divides_conductor(u, p, 0)) return ap_bad(u, p);
  auto chi = arith::residue_table(p);
  return char_sum_ap(residue_of(u, p), p, chi.data());
}

i64 ap_bsgs(i64 u, u64 p) {
  if (p < 17 || divides_conductor(u, p, 0))
    throw SetzerError(Err::Usage, "ap_bsgs: requires a good odd p >= 17", u);
  return ap_bsgs_residue(residue_of(u, p), p);
}

i64 ap(i64 u, u64 p) {
  if (p == 2) return ap_two(u);
  if (divides_conductor(u, p, 0)) return ap_bad(u, p);
  u64 r = residue_of(u, p);
  if (p <= kCharSumMaxP) {
    auto chi = arith::residue_table(p);
    return char_sum_ap(r, p, chi.data());
  }
  return ap_bsgs_residue(r, p);
}

// ---------------------------------------------------------------------------
// ApCache: a permanent small-prime tier of character-sum values plus an LRU
// tier for BSGS results. Entries are stored for the canonical residue
// min(r, p-r); the other sign is recovered through the twist by -1, which
// flips a_p exactly when p = 3 mod 4.

struct ApCache::Impl {
  struct SmallSlot {
    std::once_flag init;
    std::unique_ptr<std::atomic<i32>[]> values;  // canonical residues
    std::unique_ptr<std::int8_t[]> chi;
  };

  static constexpr i32 kUnset = INT32_MIN;
  static constexpr int kShards = 64;

  struct Shard {
    std::mutex mu;
    std::list<u64> lru;  // most recent at front
    std::unordered_map<u64, std::pair<i32, std::list<u64>::iterator>> map;
  };

  std::vector<u64> small_primes;       // odd primes <= kCharSumMaxP
  std::vector<std::uint16_t> prime_index;  // p -> slot, 0xffff if composite
  std::vector<SmallSlot> slots;
  Shard shards[kShards];
  std::size_t shard_budget_entries;
  std::atomic<u64> hit_count{0};
  std::atomic<u64> miss_count{0};

  explicit Impl(std::size_t budget_bytes) {
    auto primes = arith::small_primes(kCharSumMaxP);
    for (u64 p : *primes) {
      if (p == 2) continue;
      if (p > kCharSumMaxP) break;
      small_primes.push_back(p);
    }
    prime_index.assign(kCharSumMaxP + 1, 0xffff);
    for (size_t i = 0; i < small_primes.size(); ++i)
      prime_index[small_primes[i]] = static_cast<std::uint16_t>(i);
    slots = std::vector<SmallSlot>(small_primes.size());
    // Rough cost per LRU entry: map node + list node + slack.
    constexpr std::size_t kEntryCost = 96;
    std::size_t total = std::max<std::size_t>(budget_bytes / kEntryCost, 1024);
    shard_budget_entries = std::max<std::size_t>(total / kShards, 16);
  }

  i32 small_value(u64 p, u64 rc) {
    SmallSlot& slot = slots[prime_index[p]];
    std::call_once(slot.init, [&] {
      auto chi = arith::residue_table(p);
      slot.chi = std::make_unique<std::int8_t[]>(p);
      std::memcpy(slot.chi.get(), chi.data(), p);
      u64 m = p / 2 + 1;
      slot.values = std::make_unique<std::atomic<i32>[]>(m);
      for (u64 i = 0; i < m; ++i)
        slot.values[i].store(kUnset, std::memory_order_relaxed);
    });
    std::atomic<i32>& cell = slot.values[rc];
    i32 v = cell.load(std::memory_order_relaxed);
    if (v != kUnset) {
      hit_count.fetch_add(1, std::memory_order_relaxed);
      return v;
    }
    miss_count.fetch_add(1, std::memory_order_relaxed);
    i32 computed =
        static_cast<i32>(char_sum_ap(rc, p, slot.chi.get()));
    cell.store(computed, std::memory_order_relaxed);  // idempotent
    return computed;
  }

  i32 large_value(u64 p, u64 rc) {
    u64 key = (p << 32) | rc;
    Shard& sh = shards[(key * 0x9e3779b97f4a7c15ull) >> 58];
    {
      std::lock_guard lock(sh.mu);
      auto it = sh.map.find(key);
      if (it != sh.map.end()) {
        sh.lru.splice(sh.lru.begin(), sh.lru, it->second.second);
        hit_count.fetch_add(1, std::memory_order_relaxed);
        return it->second.first;
      }
    }
    miss_count.fetch_add(1, std::memory_order_relaxed);
    i32 v = static_cast<i32>(ap_bsgs_residue(rc, p));
    std::lock_guard lock(sh.mu);
    auto it = sh.map.find(key);
    if (it != sh.map.end()) return it->second.first;  // raced; values equal
    sh.lru.push_front(key);
    sh.map.emplace(key, std::make_pair(v, sh.lru.begin()));
    while (sh.map.size() > shard_budget_entries) {
      sh.map.erase(sh.lru.back());
      sh.lru.pop_back();
    }
    return v;
  }
};

ApCache::ApCache(std::size_t budget_bytes)
    : impl_(std::make_unique<Impl>(budget_bytes)) {}

ApCache::~ApCache() = default;

u64 ApCache::hits() const {
  return impl_->hit_count.load(std::memory_order_relaxed);
}
u64 ApCache::misses() const {
  return impl_->miss_count.load(std::memory_order_relaxed);
}

i64 ApCache::ap(i64 u, u64 p, u128 n) {
  if (p == 2) return ap_two(u);
  if (divides_conductor(u, p, n)) return ap_bad(u, p);
  u64 r = residue_of(u, p);
  if (!enabled_) {
    if (p <= kCharSumMaxP) {
      auto chi = arith::residue_table(p);
      return char_sum_ap(r, p, chi.data());
    }
    return ap_bsgs_residue(r, p);
  }
  u64 rc = std::min(r, p - r);
  bool flip = (rc != r) && ((p & 3) == 3);
  i64 v = (p <= kCharSumMaxP) ? impl_->small_value(p, rc)
                              : impl_->large_value(p, rc);
  return flip ? -v : v;
}

// ---------------------------------------------------------------------------
// Shared factor tables for the multiplicative fill of a_n.

namespace {

struct AnTables {
  std::shared_mutex mu;
  std::vector<u32> spf;  // smallest prime factor
  std::vector<u32> pw;   // spf-power component
  u64 size = 0;          // valid through index size
};

AnTables g_an_tables;

void ensure_an_tables(u64 m) {
  {
    std::shared_lock lock(g_an_tables.mu);
    if (g_an_tables.size >= m) return;
  }
  std::unique_lock lock(g_an_tables.mu);
  if (g_an_tables.size >= m) return;
  u64 target = std::max<u64>(m, std::max<u64>(g_an_tables.size * 2, 1 << 16));
  auto& spf = g_an_tables.spf;
  auto& pw = g_an_tables.pw;
  spf.assign(target + 1, 0);
  pw.assign(target + 1, 0);
  std::vector<u32> primes;
  for (u64 i = 2; i <= target; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<u32>(i);
      pw[i] = static_cast<u32>(i);
      primes.push_back(static_cast<u32>(i));
    }
    for (u32 p : primes) {
      if (p > spf[i] || i * p > target) break;
      spf[i * p] = p;
      pw[i * p] = (p == spf[i]) ? pw[i] * p : p;
    }
  }
  g_an_tables.size = target;
}

}  // namespace

void an_stream(i64 u, u128 n, u64 m, ApCache* cache, std::vector<i32>& out) {
  if (m < 1) throw SetzerError(Err::Usage, "an_stream: m must be >= 1", u);
  ensure_an_tables(m);
  std::shared_lock lock(g_an_tables.mu);
  const u32* spf = g_an_tables.spf.data();
  const u32* pw = g_an_tables.pw.data();

  out.assign(m + 1, 0);
  out[1] = 1;
  for (u64 i = 2; i <= m; ++i) {
    u64 p = spf[i];
    u64 q = pw[i];
    if (q == i) {
      if (p == i) {
        // fresh prime
        i64 apv = cache ? cache->ap(u, p, n) : ap(u, p);
        out[i] = static_cast<i32>(apv);
      } else if (n % p == 0) {
        // multiplicative reduction: a_{p^j} = a_p^j
        out[i] = static_cast<i32>(static_cast<i64>(out[p]) * out[i / p]);
      } else {
        i64 prev = out[i / p];
        i64 prev2 = out[i / p / p];
        out[i] = static_cast<i32>(static_cast<i64>(out[p]) * prev -
                                  static_cast<i64>(p) * prev2);
      }
    } else {
      out[i] = static_cast<i32>(static_cast<i64>(out[q]) *
                                static_cast<i64>(out[i / q]));
    }
  }
}

// ---------------------------------------------------------------------------
// Exponential integral.

f128 expint_e1_q(f128 x) {
  if (x <= 0)
    throw SetzerError(Err::Usage, "expint_e1: x must be positive");
  const f128 eps = FLT128_EPSILON;
  if (x <= 1) {
    // -gamma - ln x + sum (-1)^(k+1) x^k / (k k!)
    const f128 gamma =
        0.57721566490153286060651209008240243104215933593992Q;
    f128 sum = 0;
    f128 term = 1;  // x^k / k!
    f128 sign = 1;
    for (int k = 1; k < 64; ++k) {
      term = term * x / k;
      f128 contrib = sign * term / k;
      sum += contrib;
      if (fabsq(contrib) < eps * fabsq(sum)) break;
      sign = -sign;
    }
    return -gamma - logq(x) + sum;
  }
  // Modified Lentz continued fraction e^{-x}/(x+1- 1/(x+3- 4/(x+5- ...))).
  const f128 tiny = 1e-60Q;
  f128 b = x + 1;
  f128 c = 1 / tiny;
  f128 d = 1 / b;
  f128 h = d;
  for (int i = 1; i < 200; ++i) {
    f128 an = -static_cast<f128>(i) * i;
    b += 2;
    d = an * d + b;
    if (fabsq(d) < tiny) d = tiny;
    c = b + an / c;
    if (fabsq(c) < tiny) c = tiny;
    d = 1 / d;
    f128 del = d * c;
    h *= del;
    if (fabsq(del - 1) < eps) break;
  }
  return expq(-x) * h;
}

double expint_e1(double x) {
  return static_cast<double>(expint_e1_q(static_cast<f128>(x)));
}

// ---------------------------------------------------------------------------
// Series evaluation.

namespace {

template <class R>
double eval_exp_series(const std::vector<i32>& a, u64 m, f128 c) {
  using ops = RealOps<R>;
  R q = ops::from_f128(expq(-c));
  R qpow = q;
  R sum = ops::zero();
  for (u64 i = 1; i <= m; ++i) {
    if (a[i] != 0) {
      R term = ops::div_u64(ops::mul_double(qpow, static_cast<double>(a[i])),
                            i);
      sum = ops::add(sum, term);
    }
    qpow = ops::mul(qpow, q);
  }
  return 2.0 * ops::to_double(sum);
}

template <class R>
double eval_e1_series(const std::vector<i32>& a, u64 m, f128 c) {
  using ops = RealOps<R>;
  R sum = ops::zero();
  for (u64 i = 1; i <= m; ++i) {
    if (a[i] != 0) {
      R kern = ops::from_f128(expint_e1_q(c * static_cast<f128>(i)));
      R term = ops::div_u64(ops::mul_double(kern, static_cast<double>(a[i])),
                            i);
      sum = ops::add(sum, term);
    }
  }
  return 2.0 * ops::to_double(sum);
}

LValueResult eval_l(const CurveParams& params, const EvalOptions& opts,
                    ApCache* cache, LKind kind) {
  const u128 n = params.n;
  u64 m = effective_terms(n, kTailTarget);
  if (opts.term_multiplier > 1) m *= static_cast<u64>(opts.term_multiplier);

  std::vector<i32> a;
  an_stream(params.u, n, m, cache, a);

  const f128 c = 2 * M_PIq / sqrtq(to_f128(n));
  const bool quad = opts.precision_bits > RealOps<dd>::mantissa_bits;

  LValueResult res;
  res.kind = kind;
  res.terms_used = m;
  res.precision_bits =
      quad ? RealOps<f128>::mantissa_bits : RealOps<dd>::mantissa_bits;
  if (kind == LKind::LAt1) {
    res.value = quad ? eval_exp_series<f128>(a, m, c)
                     : eval_exp_series<dd>(a, m, c);
    res.tail_bound = series_tail_bound(n, m);
  } else {
    res.value = quad ? eval_e1_series<f128>(a, m, c)
                     : eval_e1_series<dd>(a, m, c);
    double cd = static_cast<double>(c);
    res.tail_bound =
        series_tail_bound(n, m) / (cd * static_cast<double>(m + 1));
  }
  return res;
}

}  // namespace

LValueResult l_at_1(const CurveParams& params, const EvalOptions& opts,
                    ApCache* cache) {
  if (params.epsilon != 1)
    throw SetzerError(Err::WrongSign,
                      "l_at_1: L(1) vanishes for odd sign; use lprime_at_1",
                      params.u);
  return eval_l(params, opts, cache, LKind::LAt1);
}

LValueResult lprime_at_1(const CurveParams& params, const EvalOptions& opts,
                         ApCache* cache) {
  if (params.epsilon != -1)
    throw SetzerError(Err::WrongSign,
                      "lprime_at_1: sign is even; use l_at_1", params.u);
  return eval_l(params, opts, cache, LKind::LPrimeAt1);
}

}  // namespace setzer
