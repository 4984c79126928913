#include <random>

#include "doctest.h"
#include "setzer/arith.hpp"

using namespace setzer;
using namespace setzer::arith;

TEST_CASE("is_prime on the family's small conductors") {
  CHECK(is_prime(89));
  CHECK_FALSE(is_prime(65));
  CHECK_FALSE(is_prime(2665));  // 5 * 13 * 41
  CHECK(is_prime(2));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
}

TEST_CASE("is_prime agrees with trial division below 1e6") {
  // Trial-division oracle, fully independent of the Miller-Rabin path.
  const u64 limit = 1000000;
  std::vector<char> sieve(limit + 1, 1);
  sieve[0] = sieve[1] = 0;
  for (u64 i = 2; i * i <= limit; ++i)
    if (sieve[i])
      for (u64 j = i * i; j <= limit; j += i) sieve[j] = 0;
  for (u64 n = 0; n <= limit; ++n) {
    if (is_prime(n) != static_cast<bool>(sieve[n])) {
      CAPTURE(n);
      REQUIRE(is_prime(n) == static_cast<bool>(sieve[n]));
    }
  }
}

TEST_CASE("is_prime beyond 64 bits") {
  // 2^89 - 1 is a Mersenne prime; its square is composite.
  u128 m89 = (static_cast<u128>(1) << 89) - 1;
  CHECK(is_prime(m89));
  CHECK_FALSE(is_prime(m89 * 3));
  u128 sq = static_cast<u128>(4294967311ull) * 4294967311ull;  // prime^2
  CHECK_FALSE(is_prime(sq));
}

TEST_CASE("factorize examples") {
  auto f = factorize(2665);
  REQUIRE(f.k() == 3);
  CHECK(f.primes[0] == 5);
  CHECK(f.primes[1] == 13);
  CHECK(f.primes[2] == 41);
  CHECK(f.squarefree());

  auto g = factorize(89);
  CHECK(g.k() == 1);
  CHECK(g.primes[0] == 89);

  auto h = factorize(6625);  // 81^2 + 64 = 5^3 * 53
  REQUIRE(h.k() == 2);
  CHECK(h.primes[0] == 5);
  CHECK(h.exponents[0] == 3);
  CHECK(h.primes[1] == 53);
  CHECK(h.exponents[1] == 1);
  CHECK_FALSE(h.squarefree());
}

TEST_CASE("factorize recomposes and certifies primality of factors") {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 200; ++i) {
    u128 n = 2 + rng() % 999999999999ull;  // up to 1e12
    auto f = factorize(n);
    CHECK(f.recompose() == n);
    for (u128 p : f.primes) CHECK(is_prime(p));
    for (size_t j = 1; j < f.primes.size(); ++j)
      CHECK(f.primes[j - 1] < f.primes[j]);
  }
}

TEST_CASE("factorize splits a large semiprime") {
  u128 p = 1000000007, q = 1000000009;
  auto f = factorize(p * q);
  REQUIRE(f.k() == 2);
  CHECK(f.primes[0] == p);
  CHECK(f.primes[1] == q);
}

TEST_CASE("legendre basics") {
  CHECK(legendre(0, 3) == 0);
  CHECK(legendre(1, 7) == 1);
  CHECK(legendre(2, 3) == -1);
  CHECK(legendre(-1, 5) == 1);   // 5 = 1 mod 4
  CHECK(legendre(-1, 7) == -1);  // 7 = 3 mod 4
}

TEST_CASE("legendre is multiplicative") {
  std::mt19937_64 rng(99);
  auto primes = prime_sieve(2000);
  for (int i = 0; i < 500; ++i) {
    u64 p = primes[2 + rng() % (primes.size() - 2)];  // odd primes
    i64 a = static_cast<i64>(rng() % 10000) - 5000;
    i64 b = static_cast<i64>(rng() % 10000) - 5000;
    CHECK(legendre(a, p) * legendre(b, p) == legendre(a * b, p));
  }
}

TEST_CASE("legendre matches Euler's criterion") {
  for (u64 p : {3ull, 5ull, 13ull, 101ull, 997ull}) {
    for (i64 a = 0; a < static_cast<i64>(p); ++a) {
      int via_euler = 0;
      u64 e = powmod(static_cast<u64>(a), (p - 1) / 2, p);
      if (e == 1) via_euler = 1;
      else if (e == p - 1) via_euler = -1;
      CHECK(legendre(a, p) == via_euler);
    }
  }
}

TEST_CASE("residue_table examples and consistency") {
  auto t3 = residue_table(3);
  CHECK(t3[0] == 0);
  CHECK(t3[1] == 1);
  CHECK(t3[2] == -1);

  auto t5 = residue_table(5);
  CHECK(t5[0] == 0);
  CHECK(t5[1] == 1);
  CHECK(t5[2] == -1);
  CHECK(t5[3] == -1);
  CHECK(t5[4] == 1);

  for (u64 p : prime_sieve(10000)) {
    if (p == 2) continue;
    auto table = residue_table(p);
    bool all = true;
    for (u64 a = 0; a < p; ++a)
      all = all && table[a] == legendre(static_cast<i64>(a), p);
    CHECK(all);
  }
}

TEST_CASE("prime_sieve basics and pi(1e6)") {
  CHECK(prime_sieve(10) == std::vector<u64>{2, 3, 5, 7});
  CHECK(prime_sieve(2) == std::vector<u64>{2});
  CHECK(prime_sieve(1).empty());
  auto primes = prime_sieve(1000000);
  CHECK(primes.size() == 78498);
  CHECK(primes.back() == 999983);
}

TEST_CASE("u128 decimal round trip") {
  CHECK(to_string(static_cast<u128>(0)) == "0");
  u128 big = (static_cast<u128>(1) << 100) + 12345;
  CHECK(parse_u128(to_string(big)) == big);
  CHECK(to_string(static_cast<i128>(-42)) == "-42");
}

TEST_CASE("mulmod128 against native on small operands") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    u64 m = 2 + rng() % (1ull << 40);
    u64 a = rng() % m, b = rng() % m;
    CHECK(mulmod128(a, b, m) == mulmod(a, b, m));
  }
}
