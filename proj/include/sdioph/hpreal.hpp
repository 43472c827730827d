#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace sdioph {

// Minimum working precision (bits) for all certified-real computations.
// Raised globally via --precision-bits; individual computations escalate
// past it on their own when an enclosure is too wide to decide something.
void set_min_precision(mpfr_prec_t bits);
mpfr_prec_t min_precision();

// A certified enclosure [lo, hi] of a real number. Every operation rounds
// lo down and hi up, so enclosures remain valid through arithmetic; the
// reported value is the midpoint and error_bound() bounds |true - value|.
class HPReal {
 public:
  explicit HPReal(mpfr_prec_t prec = 0);  // 0 -> min_precision()
  HPReal(const HPReal& o);
  HPReal(HPReal&& o) noexcept;
  HPReal& operator=(HPReal o) noexcept;
  ~HPReal();

  static HPReal exact(double x, mpfr_prec_t prec = 0);
  static HPReal exact(const mpz_class& n, mpfr_prec_t prec = 0);
  // Natural log of a positive integer, both endpoints outward-rounded.
  static HPReal log_of(const mpz_class& n, mpfr_prec_t prec = 0);
  static HPReal log_of(unsigned long n, mpfr_prec_t prec = 0);

  HPReal operator+(const HPReal& o) const;
  HPReal operator-(const HPReal& o) const;
  HPReal operator*(const HPReal& o) const;
  HPReal operator/(const HPReal& o) const;  // requires o certainly nonzero
  HPReal operator-() const;
  HPReal abs() const;
  HPReal log() const;  // requires certainly positive
  HPReal mul_ui(unsigned long k) const;
  HPReal mul_z(const mpz_class& k) const;  // k >= 0

  static HPReal max(const HPReal& a, const HPReal& b);

  bool certainly_less(const HPReal& o) const;     // hi <  o.lo
  bool certainly_greater(const HPReal& o) const;  // lo >  o.hi
  bool certainly_positive() const;
  bool certainly_negative() const;

  // Floor of the enclosed value, when both endpoints agree on it.
  std::optional<mpz_class> exact_floor() const;

  double lower() const;  // <= true value (double, rounded down)
  double upper() const;  // >= true value (double, rounded up)
  double value() const;  // midpoint
  double error_bound() const;

  mpfr_prec_t precision() const { return prec_; }

 private:
  mpfr_t lo_, hi_;
  mpfr_prec_t prec_;
  friend void swap(HPReal& a, HPReal& b) noexcept;
};

void swap(HPReal& a, HPReal& b) noexcept;

// Runs attempt(prec) at doubling precisions starting from start (or the
// global minimum) until it yields a value; throws past ~4M bits. Used for
// every "escalate until the comparison is certain" decision.
template <typename F>
auto with_rising_precision(F attempt, mpfr_prec_t start = 0)
    -> typename std::invoke_result_t<F, mpfr_prec_t>::value_type {
  mpfr_prec_t prec = start > 0 ? start : min_precision();
  for (; prec <= (mpfr_prec_t(1) << 22); prec *= 2) {
    if (auto r = attempt(prec)) return *r;
  }
  throw std::runtime_error("precision escalation exceeded 2^22 bits");
}

// floor(x) where x is given by an enclosure builder; escalates until the
// enclosure pins the floor down. build(prec) must enclose one fixed real.
template <typename F>
mpz_class certified_floor(F build, mpfr_prec_t start = 0) {
  return with_rising_precision(
      [&](mpfr_prec_t prec) { return build(prec).exact_floor(); }, start);
}

}  // namespace sdioph
