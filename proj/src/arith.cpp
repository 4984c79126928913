#include "setzer/arith.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>

#include "setzer/errors.hpp"

namespace setzer::arith {

std::string to_string(u128 n) {
  if (n == 0) return "0";
  char buf[48];
  int pos = 48;
  while (n > 0) {
    buf[--pos] = static_cast<char>('0' + static_cast<int>(n % 10));
    n /= 10;
  }
  return std::string(buf + pos, 48 - pos);
}

std::string to_string(i128 n) {
  if (n < 0) return "-" + to_string(static_cast<u128>(-n));
  return to_string(static_cast<u128>(n));
}

u128 parse_u128(const std::string& s) {
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw SetzerError(Err::Usage, "not a number: " + s);
    v = v * 10 + static_cast<u128>(c - '0');
  }
  return v;
}

u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = m > 1 ? 1 : 0;
  a %= m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Shift-and-add product; only reached when the modulus exceeds 64 bits.
u128 mulmod128(u128 a, u128 b, u128 m) {
  a %= m;
  b %= m;
  if (a == 0 || b == 0) return 0;
  if (a < b) std::swap(a, b);
  u128 r = 0;
  while (b > 0) {
    if (b & 1) {
      r += a;
      if (r >= m || r < a) r -= m;  // r < 2^128 guaranteed since m < 2^127
    }
    b >>= 1;
    if (b > 0) {
      u128 a2 = a + a;
      if (a2 >= m || a2 < a) a2 -= m;
      a = a2;
    }
  }
  return r;
}

u128 powmod128(u128 a, u128 e, u128 m) {
  u128 r = m > 1 ? 1 : 0;
  a %= m;
  while (e > 0) {
    if (e & 1) r = mulmod128(r, a, m);
    a = mulmod128(a, a, m);
    e >>= 1;
  }
  return r;
}

u64 isqrt(u64 n) {
  if (n == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n && (r + 1) != 0) ++r;
  return r;
}

u128 isqrt128(u128 n) {
  if (n == 0) return 0;
  u128 r = static_cast<u128>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

u64 gcd(u64 a, u64 b) {
  while (b != 0) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

namespace {

bool mr_witness64(u64 n, u64 a, u64 d, int r) {
  a %= n;
  if (a == 0) return true;
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

bool is_prime64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // First 12 primes: proven deterministic below 3.18e24, so for all of u64.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (!mr_witness64(n, a, d, r)) return false;
  }
  return true;
}

bool mr_witness128(u128 n, u128 a, u128 d, int r) {
  a %= n;
  if (a == 0) return true;
  u128 x = powmod128(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < r; ++i) {
    x = mulmod128(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

// Strong Lucas test with Selfridge's parameter choice. Combined with the
// base-2 Miller-Rabin test above this is Baillie-PSW.
bool strong_lucas128(u128 n) {
  // Find D in 5, -7, 9, -11, ... with Jacobi(D, n) = -1.
  i64 d_seq = 5;
  int j;
  while (true) {
    i64 a = d_seq;
    // Jacobi(a, n) for odd n.
    u128 m = n;
    int s = 1;
    u128 aa = a >= 0 ? static_cast<u128>(a) : static_cast<u128>(-a);
    if (a < 0 && (m & 3) == 3) s = -s;
    aa %= m;
    while (aa != 0) {
      while ((aa & 1) == 0) {
        aa >>= 1;
        u128 r = m & 7;
        if (r == 3 || r == 5) s = -s;
      }
      std::swap(aa, m);
      if ((aa & 3) == 3 && (m & 3) == 3) s = -s;
      aa %= m;
    }
    j = (m == 1) ? s : 0;
    if (j == -1) break;
    if (j == 0) {
      // gcd(|D|, n) > 1: composite unless n equals that small prime.
      u128 g = static_cast<u128>(d_seq >= 0 ? d_seq : -d_seq);
      return n == g;
    }
    d_seq = d_seq > 0 ? -(d_seq + 2) : -(d_seq - 2);
  }
  const i64 D = d_seq;
  // P = 1, Q = (1 - D) / 4.
  i64 q_num = (1 - D) / 4;
  u128 Q = q_num >= 0 ? static_cast<u128>(q_num) % n
                      : n - static_cast<u128>(-q_num) % n;

  u128 delta = n + 1;
  int s = 0;
  u128 d = delta;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }

  // Compute U_d, V_d by binary ladder on the bits of d.
  u128 U = 1, V = 1;  // U_1, V_1 (P = 1)
  u128 Qk = Q;        // Q^1
  int bits = 0;
  {
    u128 t = d;
    while (t > 0) {
      ++bits;
      t >>= 1;
    }
  }
  const u128 inv2 = (n + 1) >> 1;  // (n+1)/2 is the inverse of 2 mod odd n
  u128 Dmod = D >= 0 ? static_cast<u128>(D) % n
                     : n - static_cast<u128>(-D) % n;
  for (int i = bits - 2; i >= 0; --i) {
    // Double: U_{2k} = U V, V_{2k} = V^2 - 2 Q^k.
    u128 U2 = mulmod128(U, V, n);
    u128 V2 = mulmod128(V, V, n);
    V2 = (V2 + n - mulmod128(2 % n, Qk, n)) % n;
    u128 Q2 = mulmod128(Qk, Qk, n);
    U = U2;
    V = V2;
    Qk = Q2;
    if ((d >> i) & 1) {
      // Add one: U_{k+1} = (U + V)/2, V_{k+1} = (D U + V)/2.
      u128 Un = mulmod128((U + V) % n, inv2, n);
      u128 Vn = mulmod128((mulmod128(Dmod, U, n) + V) % n, inv2, n);
      Qk = mulmod128(Qk, Q, n);
      U = Un;
      V = Vn;
    }
  }
  if (U == 0 || V == 0) return true;
  for (int i = 1; i < s; ++i) {
    V = (mulmod128(V, V, n) + n - mulmod128(2 % n, Qk, n)) % n;
    if (V == 0) return true;
    Qk = mulmod128(Qk, Qk, n);
  }
  return false;
}

}  // namespace

bool is_prime(u128 n) {
  if (n <= UINT64_MAX) return is_prime64(static_cast<u64>(n));
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull, 41ull}) {
    if (n % p == 0) return false;
  }
  {
    u128 r = isqrt128(n);
    if (r * r == n) return false;
  }
  u128 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // 13 prime bases: proven deterministic below 3.317e24.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull, 41ull}) {
    if (!mr_witness128(n, a, d, r)) return false;
  }
  const u128 kProvenBound = (u128)3317044064679887ull * (u128)1000000000ull;
  if (n < kProvenBound) return true;
  return strong_lucas128(n);
}

u128 Factorization::recompose() const {
  u128 v = 1;
  for (size_t i = 0; i < primes.size(); ++i)
    for (int e = 0; e < exponents[i]; ++e) v *= primes[i];
  return v;
}

namespace {

u64 brent_rho64(u64 n, u64 c, u64 x0) {
  // Brent's cycle-finding variant of Pollard rho.
  u64 y = x0, r = 1, q = 1, g = 1, x = 0, ys = 0;
  const u64 m = 128;
  do {
    x = y;
    for (u64 i = 0; i < r; ++i) y = (mulmod(y, y, n) + c) % n;
    u64 k = 0;
    while (k < r && g == 1) {
      ys = y;
      u64 lim = std::min(m, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = (mulmod(y, y, n) + c) % n;
        q = mulmod(q, x > y ? x - y : y - x, n);
      }
      g = gcd(q, n);
      k += m;
    }
    r <<= 1;
  } while (g == 1);
  if (g == n) {
    do {
      ys = (mulmod(ys, ys, n) + c) % n;
      g = gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

u128 brent_rho128(u128 n, u128 c, u128 x0) {
  u128 y = x0, q = 1, g = 1, x = 0, ys = 0;
  u64 r = 1;
  const u64 m = 64;
  do {
    x = y;
    for (u64 i = 0; i < r; ++i) y = (mulmod128(y, y, n) + c) % n;
    u64 k = 0;
    while (k < r && g == 1) {
      ys = y;
      u64 lim = std::min(m, r - k);
      for (u64 i = 0; i < lim; ++i) {
        y = (mulmod128(y, y, n) + c) % n;
        q = mulmod128(q, x > y ? x - y : y - x, n);
      }
      u128 a = q, b = n;
      while (b != 0) {
        a %= b;
        std::swap(a, b);
      }
      g = a;
      k += m;
    }
    r <<= 1;
  } while (g == 1);
  if (g == n) {
    do {
      ys = (mulmod128(ys, ys, n) + c) % n;
      u128 a = x > ys ? x - ys : ys - x, b = n;
      while (b != 0) {
        a %= b;
        std::swap(a, b);
      }
      g = a;
    } while (g == 1);
  }
  return g;
}

u128 find_factor(u128 n) {
  // n is composite, odd, with no prime factor below 1e6.
  if (n <= UINT64_MAX) {
    u64 m = static_cast<u64>(n);
    for (u64 c = 1;; ++c) {
      u64 g = brent_rho64(m, c, 2 + c);
      if (g != m && g != 1) return g;
    }
  }
  for (u128 c = 1;; ++c) {
    u128 g = brent_rho128(n, c, 2 + c);
    if (g != n && g != 1) return g;
  }
}

void factor_rec(u128 n, std::vector<u128>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u128 f = find_factor(n);
  factor_rec(f, out);
  factor_rec(n / f, out);
}

}  // namespace

Factorization factorize(u128 n) {
  if (n < 2) throw SetzerError(Err::Usage, "factorize: n must be >= 2");
  Factorization fac;
  fac.n = n;
  std::vector<u128> flat;
  const auto primes_snapshot = small_primes(1000000);
  for (u64 p : *primes_snapshot) {
    if (static_cast<u128>(p) * p > n) break;
    while (n % p == 0) {
      flat.push_back(p);
      n /= p;
    }
  }
  if (n > 1) {
    if (n < static_cast<u128>(1000000) * 1000000 || is_prime(n)) {
      flat.push_back(n);  // below (1e6)^2 any survivor is prime
    } else {
      factor_rec(n, flat);
    }
  }
  std::sort(flat.begin(), flat.end());
  for (u128 p : flat) {
    if (!fac.primes.empty() && fac.primes.back() == p) {
      ++fac.exponents.back();
    } else {
      fac.primes.push_back(p);
      fac.exponents.push_back(1);
    }
  }
  return fac;
}

int legendre(i64 a, u64 p) {
  // Jacobi symbol; agrees with the Legendre symbol for odd prime p.
  u64 m = p;
  i64 s = 1;
  u64 aa;
  if (a < 0) {
    if ((m & 3) == 3) s = -s;
    aa = static_cast<u64>(-a) % m;
  } else {
    aa = static_cast<u64>(a) % m;
  }
  while (aa != 0) {
    while ((aa & 1) == 0) {
      aa >>= 1;
      u64 r = m & 7;
      if (r == 3 || r == 5) s = -s;
    }
    std::swap(aa, m);
    if ((aa & 3) == 3 && (m & 3) == 3) s = -s;
    aa %= m;
  }
  return m == 1 ? static_cast<int>(s) : 0;
}

std::vector<std::int8_t> residue_table(u64 p) {
  std::vector<std::int8_t> table(p, -1);
  table[0] = 0;
  for (u64 i = 1; i <= (p - 1) / 2; ++i) table[mulmod(i, i, p)] = 1;
  return table;
}

std::vector<u64> prime_sieve(u64 bound) {
  std::vector<u64> primes;
  if (bound < 2) return primes;
  u64 root = isqrt(bound);
  std::vector<char> base(root + 1, 1);
  for (u64 i = 2; i * i <= root; ++i)
    if (base[i])
      for (u64 j = i * i; j <= root; j += i) base[j] = 0;
  std::vector<u64> base_primes;
  for (u64 i = 2; i <= root; ++i)
    if (base[i]) base_primes.push_back(i);

  const u64 segment = 1 << 18;
  std::vector<char> sieve(segment);
  for (u64 low = 2; low <= bound; low += segment) {
    u64 high = std::min(low + segment - 1, bound);
    std::fill(sieve.begin(), sieve.end(), 1);
    for (u64 p : base_primes) {
      if (p * p > high) break;
      u64 start = std::max(p * p, (low + p - 1) / p * p);
      for (u64 j = start; j <= high; j += p) sieve[j - low] = 0;
    }
    for (u64 n = low; n <= high; ++n)
      if (sieve[n - low]) primes.push_back(n);
  }
  return primes;
}

namespace {
std::shared_mutex g_primes_mutex;
std::shared_ptr<const std::vector<u64>> g_primes;
u64 g_primes_bound = 0;
}  // namespace

std::shared_ptr<const std::vector<u64>> small_primes(u64 bound) {
  {
    std::shared_lock lock(g_primes_mutex);
    if (g_primes_bound >= bound) return g_primes;
  }
  std::unique_lock lock(g_primes_mutex);
  if (g_primes_bound < bound) {
    u64 target = std::max<u64>(bound * 2, u64(1) << 16);
    g_primes = std::make_shared<const std::vector<u64>>(prime_sieve(target));
    g_primes_bound = target;
  }
  return g_primes;
}

}  // namespace setzer::arith
