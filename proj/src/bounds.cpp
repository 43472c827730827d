#include "sdioph/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdioph {

double initial_log_d_bound(const PrimePair& pair) {
  HPReal b = HPReal::log_of(pair.p).mul_ui(104076) * HPReal::log_of(pair.q);
  return b.upper();
}

double laurent_lower_bound(double log_a1, double log_a2, unsigned long b1,
                           unsigned long b2, unsigned D) {
  if (!(log_a1 > 0) || !(log_a2 > 0) || b1 == 0 || b2 == 0 || D == 0)
    throw std::invalid_argument("laurent_lower_bound needs positive inputs");
  if (log_a1 * D < 1 || log_a2 * D < 1)
    throw std::invalid_argument("needs log a_i >= 1/D");
  double bp = (double)b1 / (D * log_a2) + (double)b2 / (D * log_a1);
  double logb = std::max({std::log(bp) + 0.38, 12.0 / D, 1.0});
  double d4 = (double)D * D * D * D;
  return -23.4 * d4 * logb * logb * log_a1 * log_a2;
}

double solve_square_log(double K) {
  if (!(K > std::exp(1.0)))
    throw std::invalid_argument("solve_square_log needs K > e");
  auto f = [K](double x) { return x - K * std::log(x) * std::log(x); };
  // f(K) = K(1 - (log K)^2) < 0 for K > e; expand upward until positive.
  double lo = K, hi = 2 * K;
  if (!(f(lo) < 0)) throw std::runtime_error("no bracket for largest root");
  while (f(hi) <= 0) {
    hi *= 2;
    if (hi > 1e300) throw std::runtime_error("no upper bracket found");
  }
  while ((hi - lo) > 1e-9 * hi) {
    double mid = lo + (hi - lo) / 2;
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return lo + (hi - lo) / 2;
}

double find_delta(const PrimePair& pair, double C) {
  if (!(C >= std::log(2.0))) throw std::invalid_argument("need C >= log 2");

  // Integer caps: Q < 2C/log q  <=>  Q <= floor(2C/log q), so the exclusive
  // cap handed to the convergent enumeration is floor + 1. The boundary is
  // irrational (C is dyadic), so the floor is decidable.
  mpz_class c2 = certified_floor([&](mpfr_prec_t prec) {
    return HPReal::exact(2 * C, prec) / HPReal::log_of(pair.q, prec);
  });
  mpz_class p2 = certified_floor([&](mpfr_prec_t prec) {
    return HPReal::exact(2 * C, prec) / HPReal::log_of(pair.p, prec);
  });
  if (c2 < 1 || p2 < 1) return 2.0;  // empty box: hypothesis vacuous

  std::vector<Convergent> cs =
      convergents_of_log_ratio(pair, c2 + 1, p2 + 1);
  if (cs.empty()) return 2.0;

  // A valid lower bound for the minimum gap is the least lower endpoint of
  // the per-convergent enclosures; escalate until it clears zero.
  auto attempt = [&](mpfr_prec_t prec) -> std::optional<double> {
    HPReal lp = HPReal::log_of(pair.p, prec);
    HPReal lq = HPReal::log_of(pair.q, prec);
    double lo_min = std::numeric_limits<double>::infinity();
    for (const Convergent& c : cs) {
      HPReal gap = (lp.mul_z(c.P) - lq.mul_z(c.Q)).abs();
      lo_min = std::min(lo_min, gap.lower());
    }
    if (lo_min > 0) return lo_min;
    return std::nullopt;
  };
  return with_rising_precision(attempt);
}

ReduceResult reduce_once(const PrimePair& pair, double C, unsigned long u_p,
                         unsigned long u_q) {
  double delta = find_delta(pair, C);

  auto upper_bounds = [&](mpfr_prec_t prec) -> std::optional<ReduceResult> {
    HPReal lp = HPReal::log_of(pair.p, prec);
    HPReal lq = HPReal::log_of(pair.q, prec);
    HPReal lplq = lp * lq;
    HPReal c1 = HPReal::max(
        (HPReal::exact(2.0, prec) / HPReal::exact(delta, prec)).log(),
        (HPReal::exact(8 * C, prec) / lplq).log());
    // The C_new formula is increasing in C1 (for C1 > 0), so clamping C1 to a
    // small positive floor keeps a valid upper bound and keeps the log term
    // defined in the degenerate near-zero cases.
    double c1_up = std::max(c1.upper(), 0.01);
    HPReal c1e = HPReal::exact(c1_up, prec);
    HPReal cnew =
        c1e.mul_ui(2) + lq.mul_ui(u_q) + lp.mul_ui(u_p) +
        ((c1e * c1e).mul_ui(2) / lplq).log();
    ReduceResult r;
    r.C1 = c1_up;
    r.C_new = std::max(cnew.upper(), 1.0);  // keep find_delta applicable
    r.delta = delta;
    return r;
  };
  return with_rising_precision(upper_bounds);
}

BoundState reduce_fixpoint(const PrimePair& pair, unsigned long u_p,
                           unsigned long u_q,
                           std::vector<ReductionStep>* trace,
                           std::optional<double> override_c0) {
  BoundState st;
  st.C0 = override_c0 ? *override_c0 : initial_log_d_bound(pair);
  if (!(st.C0 > 0)) throw std::invalid_argument("C0 must be positive");
  double C = st.C0;
  for (st.iterations = 1; st.iterations <= 64; ++st.iterations) {
    ReduceResult r = reduce_once(pair, C, u_p, u_q);
    st.C1 = r.C1;
    st.delta = r.delta;
    if (trace)
      trace->push_back({st.iterations, std::min(C, r.C_new), r.C1, r.delta});
    if (r.C_new < C - 0.1) {
      C = r.C_new;
      continue;
    }
    // Both C and C_new bound log d; keep the smaller and stop.
    st.C = std::min(C, r.C_new);
    return st;
  }
  throw std::runtime_error("bound reduction did not settle in 64 iterations");
}

}  // namespace sdioph
