#include "sdioph/ntcore.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace sdioph {

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return (unsigned __int128)a * b % m;
}

uint64_t powmod_u64(uint64_t b, uint64_t e, uint64_t m) {
  uint64_t r = m > 1 ? 1 % m : 0;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, b, m);
    b = mulmod_u64(b, b, m);
    e >>= 1;
  }
  return r;
}

namespace {

bool mr_witness_u64(uint64_t n, uint64_t a, uint64_t d, int s) {
  a %= n;
  if (a == 0) return false;  // a multiple of n proves nothing
  uint64_t x = powmod_u64(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mulmod_u64(x, x, n);
    if (x == n - 1) return false;
  }
  return true;  // a witnesses compositeness
}

// Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n.
uint64_t rho_u64(uint64_t n) {
  if (n % 2 == 0) return 2;
  for (uint64_t c = 1;; ++c) {
    uint64_t x = 2, y = 2, d = 1;
    uint64_t power = 1, lam = 1;
    while (d == 1) {
      if (power == lam) {
        x = y;
        power *= 2;
        lam = 0;
      }
      y = (mulmod_u64(y, y, n) + c) % n;
      ++lam;
      uint64_t diff = x > y ? x - y : y - x;
      d = std::gcd(diff, n);
    }
    if (d != n) return d;
  }
}

mpz_class rho_mpz(const mpz_class& n) {
  // n odd composite, too big for u64
  mpz_class x, y, d, diff, c;
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(0x5d10f4u);  // deterministic runs
  for (;;) {
    x = rng.get_z_range(n - 3) + 2;
    y = x;
    c = rng.get_z_range(n - 2) + 1;
    d = 1;
    while (d == 1) {
      x = (x * x + c) % n;
      y = (y * y + c) % n;
      y = (y * y + c) % n;
      diff = x > y ? x - y : y - x;
      if (diff == 0) break;  // cycle without factor; retry with new c
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != 1 && d != n) return d;
  }
}

constexpr uint64_t kSmallPrimeCutoff = 1u << 16;

const std::vector<uint32_t>& small_primes() {
  static const std::vector<uint32_t> table = [] {
    std::vector<bool> comp(kSmallPrimeCutoff + 1, false);
    std::vector<uint32_t> ps;
    for (uint32_t i = 2; i <= kSmallPrimeCutoff; ++i) {
      if (comp[i]) continue;
      ps.push_back(i);
      for (uint64_t j = (uint64_t)i * i; j <= kSmallPrimeCutoff; j += i)
        comp[j] = true;
    }
    return ps;
  }();
  return table;
}

void factor_rec(const mpz_class& n,
                std::vector<std::pair<mpz_class, unsigned long>>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.emplace_back(n, 1);
    return;
  }
  mpz_class d;
  if (n.fits_ulong_p()) {
    d = (unsigned long)rho_u64(n.get_ui());
  } else {
    d = rho_mpz(n);
  }
  factor_rec(d, out);
  factor_rec(n / d, out);
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // Deterministic witness set for n < 2^64 (Sinclair / Feitsma-verified).
  for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull,
                     1795265022ull})
    if (mr_witness_u64(n, a, d, s)) return false;
  return true;
}

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == 8)
    return is_prime_u64(n.get_ui());
  return mpz_probab_prime_p(n.get_mpz_t(), 64) != 0;
}

PrimePair::PrimePair(mpz_class p_, mpz_class q_)
    : p(std::move(p_)), q(std::move(q_)) {
  if (!(p < q)) throw std::invalid_argument("PrimePair requires p < q");
  if (!is_prime(p) || !is_prime(q))
    throw std::invalid_argument("PrimePair requires both entries prime");
}

unsigned long padic_valuation(const mpz_class& n, const mpz_class& p) {
  if (n == 0) throw std::invalid_argument("valuation of 0 is undefined");
  mpz_class rem;
  return mpz_remove(rem.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

mpz_class multiplicative_order(const mpz_class& a, const mpz_class& m) {
  if (m < 2) throw std::invalid_argument("modulus must be >= 2");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  if (g != 1) throw std::invalid_argument("order needs gcd(a, m) = 1");

  // phi(m) from the factorization of m, then strip prime factors of phi
  // while a^(ord/r) stays 1.
  auto mf = factorize(m);
  mpz_class phi = 1;
  for (auto& [pr, e] : mf) {
    phi *= pr - 1;
    for (unsigned long i = 1; i < e; ++i) phi *= pr;
  }
  mpz_class ord = phi, t;
  for (auto& [r, e] : factorize(phi)) {
    (void)e;
    while (mpz_divisible_p(ord.get_mpz_t(), r.get_mpz_t())) {
      mpz_class cand = ord / r;
      mpz_powm(t.get_mpz_t(), a.get_mpz_t(), cand.get_mpz_t(), m.get_mpz_t());
      if (t != 1) break;
      ord = cand;
    }
  }
  return ord;
}

unsigned long lifted_valuation(const mpz_class& b, const mpz_class& e,
                               const mpz_class& p, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  if (b < 2 || e < 1) throw std::invalid_argument("need b >= 2, e >= 1");
  if (mpz_divisible_p(b.get_mpz_t(), p.get_mpz_t()))
    throw std::invalid_argument("p divides b");

  mpz_class mod, r;
  for (unsigned long cap = 8;; cap *= 2) {
    mpz_pow_ui(mod.get_mpz_t(), p.get_mpz_t(), cap);
    mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    r -= sign;
    if (r < 0) r += mod;
    if (r == 0) continue;  // valuation >= cap: raise the cap
    return padic_valuation(r, p);
  }
}

std::optional<SUnit> as_s_unit(const mpz_class& n, const PrimePair& pair) {
  if (n < 1) throw std::invalid_argument("S-unit test needs n >= 1");
  SUnit u;
  u.value = n;
  mpz_class m;
  u.alpha = mpz_remove(m.get_mpz_t(), n.get_mpz_t(), pair.p.get_mpz_t());
  u.beta = mpz_remove(m.get_mpz_t(), m.get_mpz_t(), pair.q.get_mpz_t());
  if (m != 1) return std::nullopt;
  return u;
}

std::vector<std::pair<mpz_class, unsigned long>> factorize(mpz_class n) {
  if (n < 1) throw std::invalid_argument("factorize needs n >= 1");
  std::vector<std::pair<mpz_class, unsigned long>> out;
  for (uint32_t sp : small_primes()) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), sp)) {
      mpz_class rem;
      unsigned long e =
          mpz_remove(rem.get_mpz_t(), n.get_mpz_t(), mpz_class(sp).get_mpz_t());
      out.emplace_back(sp, e);
      n = rem;
    }
    if (n == 1) break;
    if ((uint64_t)sp * sp > n) {  // remainder is prime
      out.emplace_back(n, 1);
      n = 1;
      break;
    }
  }
  if (n > 1) {
    std::vector<std::pair<mpz_class, unsigned long>> big;
    factor_rec(n, big);
    std::sort(big.begin(), big.end());
    for (auto& [pr, e] : big) {
      if (!out.empty() && out.back().first == pr)
        out.back().second += e;
      else
        out.emplace_back(pr, e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<mpz_class> divisors_of_factorization(
    const std::vector<std::pair<mpz_class, unsigned long>>& fac) {
  std::vector<mpz_class> divs{1};
  for (auto& [pr, e] : fac) {
    size_t base = divs.size();
    mpz_class pw = 1;
    for (unsigned long i = 1; i <= e; ++i) {
      pw *= pr;
      for (size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pw);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

std::vector<mpz_class> divisors(const mpz_class& n) {
  if (n == 0) throw std::invalid_argument("divisors of 0 are not enumerable");
  return divisors_of_factorization(factorize(n));
}

HPReal hp_log(const mpz_class& n, double target_error) {
  if (n < 2) throw std::invalid_argument("hp_log needs n >= 2");
  if (!(target_error > 0)) throw std::invalid_argument("target_error <= 0");
  mpfr_prec_t prec = std::max<mpfr_prec_t>(
      min_precision(), mpz_sizeinbase(n.get_mpz_t(), 2) + 16);
  for (;; prec *= 2) {
    HPReal r = HPReal::log_of(n, prec);
    if (r.error_bound() <= target_error) return r;
    if (prec > (mpfr_prec_t(1) << 22))
      throw std::runtime_error("hp_log precision escalation failed");
  }
}

std::vector<Convergent> convergents_of_log_ratio(const PrimePair& pair,
                                                 const mpz_class& Q_max,
                                                 const mpz_class& P_max) {
  if (Q_max < 1 || P_max < 1)
    throw std::invalid_argument("convergent caps must be >= 1");

  // One expansion attempt at fixed precision; nullopt when an interval is
  // too wide to certify the next digit.
  auto attempt = [&](mpfr_prec_t prec)
      -> std::optional<std::vector<Convergent>> {
    HPReal x = HPReal::log_of(pair.q, prec) / HPReal::log_of(pair.p, prec);
    std::vector<Convergent> out;
    mpz_class h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    for (;;) {
      auto a = x.exact_floor();
      if (!a) return std::nullopt;
      mpz_class P = *a * h1 + h2, Q = *a * k1 + k2;
      if (P >= P_max || Q >= Q_max) break;  // later convergents only grow
      out.push_back({P, Q});
      HPReal frac = x - HPReal::exact(*a, prec);
      if (!frac.certainly_positive()) return std::nullopt;
      x = HPReal::exact(1.0, prec) / frac;
      h2 = h1; h1 = P;
      k2 = k1; k1 = Q;
    }
    return out;
  };

  std::vector<Convergent> list = with_rising_precision(attempt);
  // Stability check demanded of the digits: recompute at doubled precision
  // until two consecutive precisions produce the identical list.
  for (mpfr_prec_t prec = 2 * min_precision();; prec *= 2) {
    auto again = attempt(prec);
    if (again && *again == list) return list;
    if (again) list = *again;
    if (prec > (mpfr_prec_t(1) << 22))
      throw std::runtime_error("convergent list failed to stabilize");
  }
}

}  // namespace sdioph
