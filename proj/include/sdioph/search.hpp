#pragma once

#include <optional>
#include <vector>

#include "sdioph/bounds.hpp"
#include "sdioph/tuples.hpp"
#include "sdioph/wieferich.hpp"

namespace sdioph {

// Everything one pair's search produced: the bound reduction, the triple
// stage, and the (expected empty) quadruple stage.
struct SearchReport {
  PrimePair pair;
  WieferichProfile wieferich;
  BoundState bounds;
  std::vector<ReductionStep> trace;
  size_t triples_count = 0;
  std::vector<STuple> triples;     // retained only when triples_count < 10000
  std::vector<STuple> quadruples;  // certified; empty within proven ranges
  unsigned long alpha_cap_triples = 0;  // floor(C1/log p)
  unsigned long beta_cap_triples = 0;   // floor(C1/log q)
  unsigned long alpha_cap_quads = 0;    // floor(C/log p)
  unsigned long beta_cap_quads = 0;     // floor(C/log q)
  double millis = 0.0;
};

// Triples (a,b,c) with ab+1, ac+1 <= e^C1 (exponent-capped) and bc+1 an
// S-unit, found by factoring gcd(s1-1, s2-1) over all S-unit pairs s1 < s2.
std::vector<STuple> enumerate_triples(const PrimePair& pair, double c1);

// Quadruple stage: for each s6 = p^a6 q^b6 within the C cap and each triple,
// d = (s6-1)/c; keep (a,b,c,d) when d > c is integral and ad+1, bd+1 are
// S-units.
std::vector<STuple> extend_quadruples(const PrimePair& pair, double c,
                                      const std::vector<STuple>& triples);

// Full pipeline for one pair: Wieferich profile, bound reduction, triple
// enumeration, quadruple extension. Pairs with both primes 1 mod 4 need an
// explicit starting bound (the default constant is not justified for them).
SearchReport search_pair(const PrimePair& pair,
                         std::optional<double> override_c0 = std::nullopt);

}  // namespace sdioph
