#pragma once

#include <gmpxx.h>

#include "sdioph/ntcore.hpp"

namespace sdioph {

// Lifted-exponent data for a prime pair: how far the Fermat quotients of each
// prime vanish modulo the other.
struct WieferichProfile {
  PrimePair pair;
  unsigned long u_p = 0;  // v_p(q^(p-1) - 1)
  unsigned long u_q = 0;  // v_q(p^(q-1) - 1)
  mpz_class ord_p_of_q;   // multiplicative order of q mod p
  mpz_class ord_q_of_p;   // multiplicative order of p mod q
  bool ordinary = false;  // u_p >= 2 and u_q >= 2
  bool extreme = false;   // u_q >= 2 and u_p >= max{2, log q / log p}
};

WieferichProfile wieferich_profile(const PrimePair& pair);

// Does p^2 divide q^(p-1) - 1?  Single modular exponentiation; equivalent to
// u_p >= 2 but far cheaper than computing the full valuation.
bool p_square_divides(const mpz_class& p, const mpz_class& q);
bool p_square_divides(unsigned long p, unsigned long q);  // needs p < 2^32
inline bool p_square_divides(const PrimePair& pair) {
  return p_square_divides(pair.p, pair.q);
}

}  // namespace sdioph
