#pragma once

// The two-parameter curve family of conductor u^2 + 64 (u = 1 mod 4):
//   E1(u): y^2 + xy = x^3 + ((u-1)/4) x^2 - x
//   E2(u): y^2 + xy = x^3 + ((u-1)/4) x^2 + 4x + u
// Construction, population classification, and the closed-form arithmetic
// invariants shared by both curves.

#include <string>

#include "setzer/arith.hpp"

namespace setzer {

enum class CurveClass {
  Star,        // u^2+64 prime
  DoubleStar,  // u^2+64 squarefree, odd number of prime factors (k >= 3)
  EvenK,       // u^2+64 squarefree, even number of prime factors
  Rejected,
};

enum class RejectReason {
  None,
  BadResidue,     // u != 1 mod 4
  NotSquarefree,  // u^2+64 has a repeated prime factor
};

std::string class_name(CurveClass c);

struct CurveParams {
  i64 u = 0;
  u128 n = 0;  // conductor u^2 + 64
  arith::Factorization factorization;
  int k = 0;  // number of distinct prime factors of n
  CurveClass cls = CurveClass::Rejected;
  RejectReason reason = RejectReason::None;
  int epsilon = 0;  // root number, +1/-1 when n squarefree

  bool accepted() const { return cls != CurveClass::Rejected; }
};

struct WeierstrassModel {
  i64 u = 0;
  int index = 1;  // 1 or 2
  i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  i128 b2 = 0, b4 = 0, b6 = 0, b8 = 0;
  i128 discriminant = 0;
};

struct CurveInvariants {
  int torsion_order = 2;
  u64 cfin1 = 1;        // Tamagawa product of E1
  u64 cfin2 = 2;        // Tamagawa product of E2: 2^k
  int cinf_factor1 = 2; // C_inf(E1) = 2 * Omega
  int cinf_factor2 = 1; // C_inf(E2) = Omega
  int rank_bound = 0;   // k - 1 from the descent bound
};

// Pure; rejection is a value, never an error. |u| <= 2^50.
CurveParams classify(i64 u);

// Throws Err::BadResidue unless u = 1 mod 4. |u| < 2^31 so the
// discriminants fit in 128 bits.
WeierstrassModel model(i64 u, int curve_index);

// (-1)^(k+1) for squarefree conductors.
int root_number(int k);

CurveInvariants invariants(const CurveParams& params);

// True iff the model has exactly one rational 2-division point and no
// rational 4-division point, checked by exact root counting.
bool verify_two_torsion(i64 u, int curve_index);

}  // namespace setzer
