#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sdioph/hpreal.hpp"

namespace sdioph {

// Deterministic Miller-Rabin below 2^64, 64 probabilistic rounds above.
bool is_prime(const mpz_class& n);
bool is_prime_u64(uint64_t n);

// a*b mod m and b^e mod m without overflow (128-bit intermediate).
uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m);
uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m);

// Two distinct primes p < q.
struct PrimePair {
  mpz_class p, q;
  PrimePair(mpz_class p_, mpz_class q_);
  unsigned long p_ul() const { return p.get_ui(); }
  unsigned long q_ul() const { return q.get_ui(); }
};

// value = p^alpha * q^beta for the owning pair.
struct SUnit {
  mpz_class value;
  unsigned long alpha = 0;
  unsigned long beta = 0;
};

// Convergent P/Q of a continued-fraction expansion; gcd(P,Q)=1.
struct Convergent {
  mpz_class P, Q;
  bool operator==(const Convergent& o) const { return P == o.P && Q == o.Q; }
};

// Largest k with p^k | n. Rejects n = 0.
unsigned long padic_valuation(const mpz_class& n, const mpz_class& p);

// Smallest k >= 1 with a^k = 1 mod m; requires gcd(a, m) = 1.
mpz_class multiplicative_order(const mpz_class& a, const mpz_class& m);

// v_p(b^e - sign) for sign in {+1,-1}, via modular exponentiation mod p^k
// with an escalating cap k (b^e itself is never expanded). Requires p prime,
// p not dividing b, b >= 2, e >= 1.
unsigned long lifted_valuation(const mpz_class& b, const mpz_class& e,
                               const mpz_class& p, int sign);

// (alpha, beta) with n = p^alpha q^beta, or nullopt if n has other factors.
std::optional<SUnit> as_s_unit(const mpz_class& n, const PrimePair& pair);

// prime -> exponent, primes ascending.
std::vector<std::pair<mpz_class, unsigned long>> factorize(mpz_class n);

// All divisors of n, ascending. Rejects n = 0.
std::vector<mpz_class> divisors(const mpz_class& n);
std::vector<mpz_class> divisors_of_factorization(
    const std::vector<std::pair<mpz_class, unsigned long>>& fac);

// Natural log of n >= 2 with certified absolute error <= target_error.
HPReal hp_log(const mpz_class& n, double target_error);

// All continued-fraction convergents P/Q of log q / log p with Q < Q_max and
// P < P_max. Digits are certified by interval floors and the whole list is
// recomputed at doubled precision until it is reproduced unchanged.
std::vector<Convergent> convergents_of_log_ratio(const PrimePair& pair,
                                                 const mpz_class& Q_max,
                                                 const mpz_class& P_max);

}  // namespace sdioph
