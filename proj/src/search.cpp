#include "sdioph/search.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace sdioph {

namespace {

// floor(bound / log prime), certified. bound > 0, so the result is >= 0;
// the ratio is irrational, so the floor always pins down.
unsigned long exponent_cap(double bound, const mpz_class& prime) {
  mpz_class f = certified_floor([&](mpfr_prec_t prec) {
    return HPReal::exact(bound, prec) / HPReal::log_of(prime, prec);
  });
  if (f < 0) throw std::logic_error("negative exponent cap from positive bound");
  return f.get_ui();
}

struct SValue {
  mpz_class s;
  std::vector<std::pair<mpz_class, unsigned long>> fac_sm1;  // factors of s-1
};

// All s = p^a q^b >= 2 with a <= a_cap, b <= b_cap, ascending, each with
// s-1 factored once up front (the gcds below reuse these factorizations).
std::vector<SValue> s_values(const PrimePair& pair, unsigned long a_cap,
                             unsigned long b_cap, bool factor) {
  std::vector<SValue> out;
  mpz_class pa = 1;
  for (unsigned long a = 0; a <= a_cap; ++a, pa *= pair.p) {
    mpz_class s = pa;
    for (unsigned long b = 0; b <= b_cap; ++b, s *= pair.q)
      if (s >= 2) out.push_back({s, {}});
  }
  std::sort(out.begin(), out.end(),
            [](const SValue& x, const SValue& y) { return x.s < y.s; });
  if (factor)
    for (SValue& v : out) v.fac_sm1 = factorize(v.s - 1);
  return out;
}

// gcd of two factored numbers: exponent-wise minimum.
std::vector<std::pair<mpz_class, unsigned long>> gcd_factorization(
    const std::vector<std::pair<mpz_class, unsigned long>>& x,
    const std::vector<std::pair<mpz_class, unsigned long>>& y) {
  std::vector<std::pair<mpz_class, unsigned long>> g;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (i->first < j->first) ++i;
    else if (j->first < i->first) ++j;
    else {
      g.emplace_back(i->first, std::min(i->second, j->second));
      ++i, ++j;
    }
  }
  return g;
}

STuple certify(const std::vector<mpz_class>& entries, const PrimePair& pair) {
  VerifyOutcome v = verify_tuple(entries, pair);
  if (!v.certified)
    throw std::logic_error("search produced an uncertified tuple");
  return *v.tuple;
}

void sort_dedup(std::vector<STuple>& v) {
  auto less = [](const STuple& x, const STuple& y) { return x.entries < y.entries; };
  auto eq = [](const STuple& x, const STuple& y) { return x.entries == y.entries; };
  std::sort(v.begin(), v.end(), less);
  v.erase(std::unique(v.begin(), v.end(), eq), v.end());
}

}  // namespace

std::vector<STuple> enumerate_triples(const PrimePair& pair, double c1) {
  if (!(c1 > 0)) throw std::invalid_argument("enumerate_triples: C1 must be positive");
  unsigned long a_cap = exponent_cap(c1, pair.p);
  unsigned long b_cap = exponent_cap(c1, pair.q);
  std::vector<SValue> sv = s_values(pair, a_cap, b_cap, /*factor=*/true);

  std::vector<STuple> out;
  for (size_t i = 0; i < sv.size(); ++i) {
    mpz_class s1m1 = sv[i].s - 1;
    for (size_t j = i + 1; j < sv.size(); ++j) {
      mpz_class s2m1 = sv[j].s - 1;
      // a ranges over divisors of gcd(s1-1, s2-1); a < b = (s1-1)/a forces
      // a^2 < s1-1, so the ascending scan can stop early.
      for (const mpz_class& a : divisors_of_factorization(
               gcd_factorization(sv[i].fac_sm1, sv[j].fac_sm1))) {
        if (a * a >= s1m1) break;
        mpz_class b = s1m1 / a;
        mpz_class c = s2m1 / a;  // integral: a | gcd divides both
        if (!as_s_unit(b * c + 1, pair)) continue;
        out.push_back(certify({a, b, c}, pair));
      }
    }
  }
  sort_dedup(out);
  return out;
}

std::vector<STuple> extend_quadruples(const PrimePair& pair, double c,
                                      const std::vector<STuple>& triples) {
  if (!(c > 0)) throw std::invalid_argument("extend_quadruples: C must be positive");
  if (triples.empty()) return {};
  unsigned long a_cap = exponent_cap(c, pair.p);
  unsigned long b_cap = exponent_cap(c, pair.q);
  std::vector<SValue> sv = s_values(pair, a_cap, b_cap, /*factor=*/false);

  std::vector<STuple> out;
  for (const SValue& v : sv) {
    mpz_class s6m1 = v.s - 1;
    for (const STuple& t : triples) {
      const mpz_class& a = t.entries[0];
      const mpz_class& b = t.entries[1];
      const mpz_class& c3 = t.entries[2];
      if (!mpz_divisible_p(s6m1.get_mpz_t(), c3.get_mpz_t())) continue;
      mpz_class d = s6m1 / c3;
      if (d <= c3) continue;
      if (!as_s_unit(a * d + 1, pair)) continue;
      if (!as_s_unit(b * d + 1, pair)) continue;
      out.push_back(certify({a, b, c3, d}, pair));
    }
  }
  sort_dedup(out);
  return out;
}

SearchReport search_pair(const PrimePair& pair, std::optional<double> override_c0) {
  auto t0 = std::chrono::steady_clock::now();
  if (!override_c0 && pair.p % 4 == 1 && pair.q % 4 == 1)
    throw std::domain_error(
        "constant inapplicable: both primes are 1 mod 4; pass an explicit C0");

  WieferichProfile w = wieferich_profile(pair);
  std::vector<ReductionStep> trace;
  BoundState st = reduce_fixpoint(pair, w.u_p, w.u_q, &trace, override_c0);

  SearchReport rep{pair, std::move(w), st, std::move(trace)};
  rep.alpha_cap_triples = exponent_cap(st.C1, pair.p);
  rep.beta_cap_triples = exponent_cap(st.C1, pair.q);
  rep.alpha_cap_quads = exponent_cap(st.C, pair.p);
  rep.beta_cap_quads = exponent_cap(st.C, pair.q);

  std::vector<STuple> triples = enumerate_triples(pair, st.C1);
  rep.triples_count = triples.size();
  rep.quadruples = extend_quadruples(pair, st.C, triples);
  if (rep.triples_count < 10000) rep.triples = std::move(triples);

  rep.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return rep;
}

}  // namespace sdioph
