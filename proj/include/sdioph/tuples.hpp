#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sdioph/ntcore.hpp"

namespace sdioph {

// Certified m-tuple (m = 2..4) of distinct ascending positive integers whose
// pairwise products + 1 are all S-units. products holds the S-unit data of
// a_i*a_j + 1 in lexicographic (i, j) order, which for a quadruple is exactly
// s_1 = ab+1, s_2 = ac+1, s_3 = ad+1, s_4 = bc+1, s_5 = bd+1, s_6 = cd+1.
struct STuple {
  std::vector<mpz_class> entries;
  PrimePair pair;
  std::vector<SUnit> products;
};

// The twelve exponents (alpha_i, beta_i) of s_1..s_6, index 0 = s_1.
struct ExponentMatrix {
  std::array<unsigned long, 6> alpha{};
  std::array<unsigned long, 6> beta{};
};

struct VerifyOutcome {
  bool certified = false;
  std::optional<STuple> tuple;       // set when certified
  std::size_t bad_i = 0, bad_j = 0;  // offending entry indices otherwise
  mpz_class bad_product;             // a_i*a_j + 1 that is not an S-unit
};

// Checks every pairwise product; rejects non-ascending/duplicate entries.
VerifyOutcome verify_tuple(const std::vector<mpz_class>& entries,
                           const PrimePair& pair);

// Exponent matrix of a certified quadruple.
ExponentMatrix exponent_matrix(const STuple& quad);

// (ac+1) does not divide (bc+1) for a < b < c; total on raw entries.
bool check_nondivisibility(const std::vector<mpz_class>& entries);
bool check_nondivisibility(const STuple& triple);

// In each of (a2,a3,a4,a5), (a1,a2,a5,a6), (a1,a3,a4,a6) and the three beta
// analogues, the two smallest values are equal.
bool check_min_coincide(const ExponentMatrix& m);

// All four gcd-quotient divisibility statements for a,b,c,d and all four
// strict gcd-product inequalities for s4, s5, s6, s6.
bool check_divisor_bounds(const STuple& quad);

// Which of a1=a6, a2=a5, a3=a4 equals the forced base exponent (0 for
// p = 3 mod 4, 1 for p = 2): tags "16-zero"/"25-zero"/"34-zero" resp.
// "…-one". Errors for p = 1 mod 4, p != 2.
std::optional<std::string> check_mod4_pattern(const ExponentMatrix& m,
                                              const PrimePair& pair);

enum class TableCase { I, II, III, IV };
const char* table_case_name(TableCase c);

// Matches the twelve exponents against the four order/equality rows of the
// restriction table for p = 3 mod 4 (base 0) or p = 2 (base 1).
std::optional<TableCase> classify_table_case(const ExponentMatrix& m,
                                             const PrimePair& pair);

struct BruteForceResult {
  std::vector<STuple> triples;
  std::vector<STuple> quadruples;
};

// Exhaustive certified search over entries <= max_entry.
BruteForceResult brute_force_search(const PrimePair& pair,
                                    unsigned long max_entry);

}  // namespace sdioph
