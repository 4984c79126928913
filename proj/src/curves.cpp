#include "setzer/curves.hpp"

#include <algorithm>
#include <cstdlib>

#include "setzer/errors.hpp"

namespace setzer {

namespace {

bool residue_ok(i64 u) {
  i64 r = u % 4;
  if (r < 0) r += 4;
  return r == 1;
}

u128 conductor(i64 u) {
  i128 uu = static_cast<i128>(u) * u;
  return static_cast<u128>(uu) + 64;
}

}  // namespace

std::string class_name(CurveClass c) {
  switch (c) {
    case CurveClass::Star: return "star";
    case CurveClass::DoubleStar: return "doublestar";
    case CurveClass::EvenK: return "evenk";
    case CurveClass::Rejected: return "rejected";
  }
  return "?";
}

CurveParams classify(i64 u) {
  CurveParams p;
  p.u = u;
  p.n = conductor(u);
  if (!residue_ok(u)) {
    p.cls = CurveClass::Rejected;
    p.reason = RejectReason::BadResidue;
    return p;
  }
  p.factorization = arith::factorize(p.n);
  p.k = p.factorization.k();
  if (!p.factorization.squarefree()) {
    p.cls = CurveClass::Rejected;
    p.reason = RejectReason::NotSquarefree;
    return p;
  }
  p.epsilon = root_number(p.k);
  if (p.k == 1) {
    p.cls = CurveClass::Star;
  } else if (p.k % 2 == 1) {
    p.cls = CurveClass::DoubleStar;
  } else {
    p.cls = CurveClass::EvenK;
  }
  return p;
}

WeierstrassModel model(i64 u, int curve_index) {
  if (!residue_ok(u))
    throw SetzerError(Err::BadResidue, "model: u must be 1 mod 4", u);
  if (curve_index != 1 && curve_index != 2)
    throw SetzerError(Err::Usage, "model: curve index must be 1 or 2", u);
  if (std::llabs(u) >= (i64(1) << 31))
    throw SetzerError(Err::Usage, "model: |u| must be below 2^31", u);

  WeierstrassModel m;
  m.u = u;
  m.index = curve_index;
  m.a1 = 1;
  m.a2 = (u - 1) / 4;
  m.a3 = 0;
  m.a4 = curve_index == 1 ? -1 : 4;
  m.a6 = curve_index == 1 ? 0 : u;

  auto I = [](i64 v) { return static_cast<i128>(v); };
  m.b2 = I(m.a1) * m.a1 + 4 * I(m.a2);
  m.b4 = 2 * I(m.a4) + I(m.a1) * m.a3;
  m.b6 = I(m.a3) * m.a3 + 4 * I(m.a6);
  m.b8 = I(m.a1) * m.a1 * m.a6 + 4 * I(m.a2) * m.a6 -
         I(m.a1) * m.a3 * m.a4 + I(m.a2) * m.a3 * m.a3 - I(m.a4) * m.a4;
  m.discriminant = -m.b2 * m.b2 * m.b8 - 8 * m.b4 * m.b4 * m.b4 -
                   27 * m.b6 * m.b6 + 9 * m.b2 * m.b4 * m.b6;

  // Sign sanity: disc(E1) = N > 0, disc(E2) = -N^2 < 0.
  if ((curve_index == 1) != (m.discriminant > 0))
    throw SetzerError(Err::Usage, "model: discriminant sign check failed", u);
  return m;
}

int root_number(int k) { return (k % 2 == 1) ? 1 : -1; }

CurveInvariants invariants(const CurveParams& params) {
  if (!params.accepted())
    throw SetzerError(Err::Usage, "invariants: curve was rejected", params.u);
  CurveInvariants inv;
  inv.torsion_order = 2;
  inv.cfin1 = 1;
  inv.cfin2 = u64(1) << params.k;
  inv.cinf_factor1 = 2;
  inv.cinf_factor2 = 1;
  inv.rank_bound = std::max(0, params.k - 1);
  return inv;
}

namespace {

// All positive divisors of |v|, v != 0.
std::vector<i128> unsigned_divisors(i128 v) {
  u128 n = static_cast<u128>(v < 0 ? -v : v);
  std::vector<i128> divs{1};
  if (n > 1) {
    auto fac = arith::factorize(n);
    for (size_t i = 0; i < fac.primes.size(); ++i) {
      size_t count = divs.size();
      i128 pe = 1;
      for (int e = 1; e <= fac.exponents[i]; ++e) {
        pe *= static_cast<i128>(fac.primes[i]);
        for (size_t j = 0; j < count; ++j) divs.push_back(divs[j] * pe);
      }
    }
  }
  return divs;
}

i128 eval_monic_cubic(i128 c2, i128 c1, i128 c0, i128 x) {
  return ((x + c2) * x + c1) * x + c0;
}

// Integer roots of a monic integer cubic X^3 + c2 X^2 + c1 X + c0.
int monic_cubic_integer_roots(i128 c2, i128 c1, i128 c0,
                              std::vector<i128>* roots = nullptr) {
  std::vector<i128> found;
  auto consider = [&](i128 x) {
    if (eval_monic_cubic(c2, c1, c0, x) == 0 &&
        std::find(found.begin(), found.end(), x) == found.end()) {
      found.push_back(x);
    }
  };
  if (c0 == 0) {
    consider(0);
    // Remaining quadratic X^2 + c2 X + c1.
    i128 disc = c2 * c2 - 4 * c1;
    if (disc >= 0) {
      u128 root = arith::isqrt128(static_cast<u128>(disc));
      if (static_cast<i128>(root) * static_cast<i128>(root) == disc) {
        i128 r = static_cast<i128>(root);
        if (((-c2 + r) & 1) == 0) consider((-c2 + r) / 2);
        if (((-c2 - r) & 1) == 0) consider((-c2 - r) / 2);
      }
    }
  } else {
    for (i128 d : unsigned_divisors(c0)) {
      consider(d);
      consider(-d);
    }
  }
  if (roots) *roots = found;
  return static_cast<int>(found.size());
}

}  // namespace

bool verify_two_torsion(i64 u, int curve_index) {
  WeierstrassModel m = model(u, curve_index);

  // 2-division points: y = -(a1 x + a3)/2 substituted into the curve gives
  // the completed-square cubic. Scaled with X = 4x it is monic and integer:
  //   P(X) = X^3 + b2 X^2 + 8 b4 X + 16 b6.
  const i128 c2 = m.b2, c1 = 8 * m.b4, c0 = 16 * m.b6;
  std::vector<i128> two_roots;
  int two_count = monic_cubic_integer_roots(c2, c1, c0, &two_roots);
  if (two_count != 1) return false;
  const i128 xt = two_roots[0];  // scaled x-coordinate of the 2-torsion point

  // 4-division points halve the 2-torsion point: x(2P) = x_T. Eliminating
  // y(2P) with the duplication formula and scaling by 256 yields the monic
  // integer quartic
  //   R(X) = (3X^2 + 2 b2 X + 8 b4)^2 - 4 P(X) (2X + b2 + X_T).
  auto P = [&](i128 X) { return eval_monic_cubic(c2, c1, c0, X); };
  auto R = [&](i128 X) {
    i128 g = 3 * X * X + 2 * m.b2 * X + 8 * m.b4;
    return g * g - 4 * P(X) * (2 * X + m.b2 + xt);
  };
  i128 r0 = R(0);
  auto is_four_division_root = [&](i128 X) {
    if (R(X) != 0) return false;
    // The halved point is rational only if its y-coordinate is; P(X) must be
    // a perfect square (P(X) = (8y)^2 at x = X/4).
    i128 v = P(X);
    if (v < 0) return false;
    u128 s = arith::isqrt128(static_cast<u128>(v));
    return static_cast<i128>(s) * static_cast<i128>(s) == v;
  };
  if (r0 == 0) {
    if (is_four_division_root(0)) return false;
  } else {
    for (i128 d : unsigned_divisors(r0)) {
      if (is_four_division_root(d) || is_four_division_root(-d)) return false;
    }
  }
  return true;
}

}  // namespace setzer
