#pragma once

#include <optional>
#include <vector>

#include "sdioph/ntcore.hpp"

namespace sdioph {

// State of the continued-fraction reduction of the initial Baker-type bound.
// C is the current certified bound on log d, C1 the companion bound from the
// convergent lemma, delta the certified gap lower bound that justified it.
struct BoundState {
  double C0 = 0;
  double C = 0;
  double C1 = 0;
  double delta = 0;
  unsigned iterations = 0;
};

struct ReductionStep {
  unsigned iteration = 0;  // 1-based
  double C = 0;            // bound after this step
  double C1 = 0;
  double delta = 0;
};

// C0 = 104076 * log p * log q, rounded up.
double initial_log_d_bound(const PrimePair& pair);

// Exponent of the two-logarithm lower bound:
//   -23.4 * D^4 * (log b)^2 * log_a1 * log_a2,
// where log b = max{log(b1/(D log_a2) + b2/(D log_a1)) + 0.38, 12/D, 1}.
double laurent_lower_bound(double log_a1, double log_a2, unsigned long b1,
                           unsigned long b2, unsigned D);

// Largest root of x = K (log x)^2, bracketed bisection to 1e-9 relative.
double solve_square_log(double K);

// Certified positive lower bound on |P log p - Q log q| over all convergents
// P/Q of log q/log p with Q < 2C/log q and P < 2C/log p. Returns 2 when the
// box contains no convergent (vacuous hypothesis; neutralizes log(2/delta)).
double find_delta(const PrimePair& pair, double C);

struct ReduceResult {
  double C_new = 0;
  double C1 = 0;
  double delta = 0;
};

// One application of the convergent lemma: given C >= log d,
//   C1    = max{log(2/delta), log(8C/(log p log q))}        (rounded up)
//   C_new = 2 C1 + u_q log q + u_p log p + log(2 C1^2/(log p log q))
// with every bound rounded conservatively upward.
ReduceResult reduce_once(const PrimePair& pair, double C, unsigned long u_p,
                         unsigned long u_q);

// Iterates reduce_once from C0 until the improvement drops below 0.1
// (defensive cap of 64 iterations). Optional per-step trace for reporting.
BoundState reduce_fixpoint(const PrimePair& pair, unsigned long u_p,
                           unsigned long u_q,
                           std::vector<ReductionStep>* trace = nullptr,
                           std::optional<double> override_c0 = std::nullopt);

}  // namespace sdioph
