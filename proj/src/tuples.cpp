#include "sdioph/tuples.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdioph {

VerifyOutcome verify_tuple(const std::vector<mpz_class>& entries,
                           const PrimePair& pair) {
  if (entries.size() < 2 || entries.size() > 4)
    throw std::invalid_argument("tuple length must be 2..4");
  if (entries.front() < 1)
    throw std::invalid_argument("entries must be positive");
  for (size_t i = 1; i < entries.size(); ++i)
    if (!(entries[i - 1] < entries[i]))
      throw std::invalid_argument("entries must be strictly ascending");

  VerifyOutcome out;
  STuple t{entries, pair, {}};
  for (size_t i = 0; i < entries.size(); ++i)
    for (size_t j = i + 1; j < entries.size(); ++j) {
      mpz_class prod = entries[i] * entries[j] + 1;
      auto su = as_s_unit(prod, pair);
      if (!su) {
        out.bad_i = i;
        out.bad_j = j;
        out.bad_product = prod;
        return out;
      }
      t.products.push_back(*su);
    }
  if (entries.size() == 4) {
    // Orderings forced by a<b<c<d; kept as a hard consistency check.
    auto& s = t.products;
    if (!(s[0].value < s[1].value && s[1].value < s[2].value &&
          s[2].value < s[4].value && s[4].value < s[5].value &&
          s[1].value < s[3].value && s[3].value < s[4].value))
      throw std::logic_error("product ordering invariant violated");
  }
  out.certified = true;
  out.tuple = std::move(t);
  return out;
}

ExponentMatrix exponent_matrix(const STuple& quad) {
  if (quad.entries.size() != 4 || quad.products.size() != 6)
    throw std::invalid_argument("exponent matrix needs a certified quadruple");
  ExponentMatrix m;
  for (size_t i = 0; i < 6; ++i) {
    m.alpha[i] = quad.products[i].alpha;
    m.beta[i] = quad.products[i].beta;
  }
  return m;
}

bool check_nondivisibility(const std::vector<mpz_class>& entries) {
  if (entries.size() != 3)
    throw std::invalid_argument("nondivisibility check expects a triple");
  mpz_class s = entries[0] * entries[2] + 1;  // ac+1
  mpz_class t = entries[1] * entries[2] + 1;  // bc+1
  return !mpz_divisible_p(t.get_mpz_t(), s.get_mpz_t());
}

bool check_nondivisibility(const STuple& triple) {
  return check_nondivisibility(triple.entries);
}

namespace {

bool two_smallest_equal(unsigned long a, unsigned long b, unsigned long c,
                        unsigned long d) {
  std::array<unsigned long, 4> v{a, b, c, d};
  std::sort(v.begin(), v.end());
  return v[0] == v[1];
}

}  // namespace

bool check_min_coincide(const ExponentMatrix& m) {
  for (const auto& e : {m.alpha, m.beta}) {
    // 1-based index quadruples (2,3,4,5), (1,2,5,6), (1,3,4,6)
    if (!two_smallest_equal(e[1], e[2], e[3], e[4])) return false;
    if (!two_smallest_equal(e[0], e[1], e[4], e[5])) return false;
    if (!two_smallest_equal(e[0], e[2], e[3], e[5])) return false;
  }
  return true;
}

namespace {

mpz_class gcd_z(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// entry | gcd over the three quotients (s_x - s_y)/gcd(s_x, s_y).
bool divides_gcd_of_quotients(const mpz_class& entry, const mpz_class& si,
                              const mpz_class& sj, const mpz_class& sk) {
  // pairs (sj, si), (sk, si), (sk, sj) with the larger index first
  mpz_class g = gcd_z((sj - si) / gcd_z(sj, si), (sk - si) / gcd_z(sk, si));
  g = gcd_z(g, (sk - sj) / gcd_z(sk, sj));
  return mpz_divisible_p(g.get_mpz_t(), entry.get_mpz_t());
}

}  // namespace

bool check_divisor_bounds(const STuple& quad) {
  if (quad.entries.size() != 4 || quad.products.size() != 6)
    throw std::invalid_argument("divisor bounds need a certified quadruple");
  const mpz_class& a = quad.entries[0];
  const mpz_class& b = quad.entries[1];
  const mpz_class& c = quad.entries[2];
  const mpz_class& d = quad.entries[3];
  const mpz_class& s1 = quad.products[0].value;
  const mpz_class& s2 = quad.products[1].value;
  const mpz_class& s3 = quad.products[2].value;
  const mpz_class& s4 = quad.products[3].value;
  const mpz_class& s5 = quad.products[4].value;
  const mpz_class& s6 = quad.products[5].value;

  if (!divides_gcd_of_quotients(a, s1, s2, s3)) return false;
  if (!divides_gcd_of_quotients(b, s1, s4, s5)) return false;
  if (!divides_gcd_of_quotients(c, s2, s4, s6)) return false;
  if (!divides_gcd_of_quotients(d, s3, s5, s6)) return false;

  if (!(gcd_z(s4, s2) * gcd_z(s4, s1) < s4)) return false;
  if (!(gcd_z(s5, s3) * gcd_z(s5, s1) < s5)) return false;
  if (!(gcd_z(s6, s3) * gcd_z(s6, s2) < s6)) return false;
  if (!(gcd_z(s6, s5) * gcd_z(s6, s4) < s6)) return false;
  return true;
}

namespace {

unsigned long base_exponent_for(const PrimePair& pair) {
  if (pair.p == 2) return 1;
  if (pair.p % 4 == 3) return 0;
  throw std::domain_error(
      "residue pattern lemma needs p = 3 mod 4 or p = 2");
}

}  // namespace

std::optional<std::string> check_mod4_pattern(const ExponentMatrix& m,
                                              const PrimePair& pair) {
  unsigned long z = base_exponent_for(pair);
  const char* suffix = z == 0 ? "-zero" : "-one";
  const auto& a = m.alpha;
  if (a[0] == z && a[5] == z) return std::string("16") + suffix;
  if (a[1] == z && a[4] == z) return std::string("25") + suffix;
  if (a[2] == z && a[3] == z) return std::string("34") + suffix;
  return std::nullopt;
}

const char* table_case_name(TableCase c) {
  switch (c) {
    case TableCase::I: return "I";
    case TableCase::II: return "II";
    case TableCase::III: return "III";
    case TableCase::IV: return "IV";
  }
  return "?";
}

std::optional<TableCase> classify_table_case(const ExponentMatrix& m,
                                             const PrimePair& pair) {
  unsigned long z = base_exponent_for(pair);
  const auto& a = m.alpha;
  const auto& b = m.beta;

  // Case I:  z=a1=a6 < a4=a5 < a2 < a3 ; b1=b2=b3 < b4 < b5 < b6
  if (a[0] == z && a[5] == z && z < a[3] && a[3] == a[4] && a[3] < a[1] &&
      a[1] < a[2] && b[0] == b[1] && b[1] == b[2] && b[2] < b[3] &&
      b[3] < b[4] && b[4] < b[5])
    return TableCase::I;
  // Case II: z=a1=a6 < a2=a5 < a3, a4 ; b3=b4 < b1=b2 < b5 < b6
  if (a[0] == z && a[5] == z && z < a[1] && a[1] == a[4] && a[1] < a[2] &&
      a[1] < a[3] && b[2] == b[3] && b[2] < b[0] && b[0] == b[1] &&
      b[1] < b[4] && b[4] < b[5])
    return TableCase::II;
  // Case III: z=a2=a5 < a1=a3 <= a4 < a6 ; b1=b6 < b3=b4 < b2 < b5
  if (a[1] == z && a[4] == z && z < a[0] && a[0] == a[2] && a[2] <= a[3] &&
      a[3] < a[5] && b[0] == b[5] && b[0] < b[2] && b[2] == b[3] &&
      b[3] < b[1] && b[1] < b[4])
    return TableCase::III;
  // Case IV: z=a3=a4 < a1=a2 < a5 < a6 ; b1=b6 < b2=b5 < b3, b4
  if (a[2] == z && a[3] == z && z < a[0] && a[0] == a[1] && a[1] < a[4] &&
      a[4] < a[5] && b[0] == b[5] && b[0] < b[1] && b[1] == b[4] &&
      b[4] < b[2] && b[4] < b[3])
    return TableCase::IV;
  return std::nullopt;
}

BruteForceResult brute_force_search(const PrimePair& pair,
                                    unsigned long max_entry) {
  if (max_entry < 3) throw std::invalid_argument("max_entry must be >= 3");

  // Ascending S-units up to max_entry^2 + 1 (largest possible product + 1).
  mpz_class cap = mpz_class(max_entry) * max_entry + 1;
  std::vector<mpz_class> sunits;
  for (mpz_class pp = 1; pp <= cap; pp *= pair.p)
    for (mpz_class v = pp; v <= cap; v *= pair.q) sunits.push_back(v);
  std::sort(sunits.begin(), sunits.end());

  // partners[a] = ascending b > a with ab+1 an S-unit, b <= max_entry.
  // b = (u-1)/a needs u = 1 mod a and a < b <= max_entry,
  // i.e. a^2 + 1 < u <= a*max_entry + 1.
  auto partners = [&](unsigned long a) {
    std::vector<mpz_class> out;
    mpz_class lo = mpz_class(a) * a + 1;
    mpz_class hi = mpz_class(a) * max_entry + 1;
    for (auto it = std::upper_bound(sunits.begin(), sunits.end(), lo);
         it != sunits.end() && *it <= hi; ++it) {
      mpz_class um1 = *it - 1;
      if (mpz_divisible_ui_p(um1.get_mpz_t(), a)) out.push_back(um1 / a);
    }
    return out;
  };

  std::vector<std::vector<mpz_class>> part(max_entry + 1);
  for (unsigned long a = 1; a <= max_entry; ++a) part[a] = partners(a);

  auto intersect = [](const std::vector<mpz_class>& x,
                      const std::vector<mpz_class>& y,
                      const mpz_class& above) {
    std::vector<mpz_class> out;
    size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] < y[j]) ++i;
      else if (y[j] < x[i]) ++j;
      else {
        if (x[i] > above) out.push_back(x[i]);
        ++i; ++j;
      }
    }
    return out;
  };

  auto certify = [&](const std::vector<mpz_class>& entries) {
    auto v = verify_tuple(entries, pair);
    if (!v.certified)
      throw std::logic_error("brute force produced an uncertified tuple");
    return *std::move(v.tuple);
  };

  BruteForceResult res;
  for (unsigned long a = 1; a <= max_entry; ++a) {
    for (const mpz_class& b : part[a]) {
      std::vector<mpz_class> cs = intersect(part[a], part[b.get_ui()], b);
      for (const mpz_class& c : cs) {
        res.triples.push_back(certify({a, b, c}));
        std::vector<mpz_class> ds = intersect(cs, part[c.get_ui()], c);
        for (const mpz_class& d : ds)
          res.quadruples.push_back(certify({a, b, c, d}));
      }
    }
  }
  return res;
}

}  // namespace sdioph
