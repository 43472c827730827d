#include "sdioph/wieferich.hpp"

#include <stdexcept>

#include "sdioph/hpreal.hpp"

namespace sdioph {

namespace {

// u_p >= log q / log p, decided with certified interval arithmetic.  The
// ratio is irrational for distinct primes, so equality never occurs and the
// comparison resolves at some finite precision.
bool exceeds_log_ratio(unsigned long u_p, const PrimePair& pair) {
  return with_rising_precision([&](mpfr_prec_t prec) -> std::optional<bool> {
    HPReal ratio = HPReal::log_of(pair.q, prec) / HPReal::log_of(pair.p, prec);
    HPReal u = HPReal::exact(static_cast<double>(u_p), prec);
    if (u.certainly_greater(ratio)) return true;
    if (ratio.certainly_greater(u)) return false;
    return std::nullopt;
  });
}

}  // namespace

WieferichProfile wieferich_profile(const PrimePair& pair) {
  WieferichProfile w{pair};
  w.u_p = lifted_valuation(pair.q, pair.p - 1, pair.p, +1);
  w.u_q = lifted_valuation(pair.p, pair.q - 1, pair.q, +1);
  w.ord_p_of_q = multiplicative_order(pair.q, pair.p);
  w.ord_q_of_p = multiplicative_order(pair.p, pair.q);
  w.ordinary = w.u_p >= 2 && w.u_q >= 2;
  // The extreme condition strengthens the u_p lower bound from 2 to
  // log q / log p once q > p^2; below that the two coincide.
  w.extreme = w.u_q >= 2 && w.u_p >= 2 &&
              (pair.q < pair.p * pair.p || exceeds_log_ratio(w.u_p, pair));
  return w;
}

bool p_square_divides(unsigned long p, unsigned long q) {
  if (p < 2 || q < 2) throw std::invalid_argument("p_square_divides: need p, q >= 2");
  if (p >= (1ul << 32)) throw std::invalid_argument("p_square_divides: p^2 overflows");
  uint64_t pu = p;
  return powmod_u64(q, pu - 1, pu * pu) == 1;
}

bool p_square_divides(const mpz_class& p, const mpz_class& q) {
  if (p < 2 || q < 2) throw std::invalid_argument("p_square_divides: need p, q >= 2");
  if (p.fits_ulong_p() && q.fits_ulong_p() && p.get_ui() < (1ul << 32))
    return p_square_divides(p.get_ui(), q.get_ui());
  mpz_class p2 = p * p;
  mpz_class e = p - 1;
  mpz_class r;
  mpz_powm(r.get_mpz_t(), q.get_mpz_t(), e.get_mpz_t(), p2.get_mpz_t());
  return r == 1;
}

}  // namespace sdioph
