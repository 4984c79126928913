#pragma once

// Exact integer arithmetic shared by every other module: deterministic
// primality, factorization, quadratic characters, prime sieving.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace setzer {

using i32 = std::int32_t;
using u32 = std::uint32_t;
using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

namespace arith {

std::string to_string(u128 n);
std::string to_string(i128 n);
u128 parse_u128(const std::string& s);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
// Slow path for moduli above 2^64; used by primality/factorization only.
u128 mulmod128(u128 a, u128 b, u128 m);
u128 powmod128(u128 a, u128 e, u128 m);

u64 isqrt(u64 n);
u128 isqrt128(u128 n);
u64 gcd(u64 a, u64 b);

// Deterministic for n < 3.317e24 (fixed Miller-Rabin witness set); above
// that, Baillie-PSW, which has no known counterexample anywhere.
bool is_prime(u128 n);

struct Factorization {
  u128 n = 0;
  std::vector<u128> primes;   // ascending, distinct
  std::vector<int> exponents; // matching, positive

  int k() const { return static_cast<int>(primes.size()); }
  bool squarefree() const {
    for (int e : exponents)
      if (e != 1) return false;
    return true;
  }
  u128 recompose() const;
};

// Trial division by sieved primes up to 1e6, then Brent-Pollard rho.
Factorization factorize(u128 n);

// Quadratic-residue character of a mod p (Jacobi symbol; p must be odd).
int legendre(i64 a, u64 p);

// table[a] = legendre(a, p) for 0 <= a < p, built in O(p) by marking squares.
std::vector<std::int8_t> residue_table(u64 p);

// All primes <= bound, ascending; segmented so memory stays
// O(sqrt(bound) + segment).
std::vector<u64> prime_sieve(u64 bound);

// Snapshot of a shared ascending prime list covering at least `bound`
// (grown on demand, safe for concurrent callers).
std::shared_ptr<const std::vector<u64>> small_primes(u64 bound);

}  // namespace arith
}  // namespace setzer
