#include "sdioph/hpreal.hpp"

#include <atomic>

namespace sdioph {

namespace {
std::atomic<mpfr_prec_t> g_min_prec{128};
}

void set_min_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > (mpfr_prec_t(1) << 22))
    throw std::invalid_argument("precision out of range");
  g_min_prec.store(bits);
}

mpfr_prec_t min_precision() { return g_min_prec.load(); }

HPReal::HPReal(mpfr_prec_t prec) : prec_(prec > 0 ? prec : min_precision()) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

HPReal::HPReal(const HPReal& o) : prec_(o.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set(lo_, o.lo_, MPFR_RNDD);
  mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

HPReal::HPReal(HPReal&& o) noexcept : prec_(o.prec_) {
  mpfr_init2(lo_, MPFR_PREC_MIN);
  mpfr_init2(hi_, MPFR_PREC_MIN);
  mpfr_swap(lo_, o.lo_);
  mpfr_swap(hi_, o.hi_);
}

HPReal& HPReal::operator=(HPReal o) noexcept {
  swap(*this, o);
  return *this;
}

HPReal::~HPReal() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void swap(HPReal& a, HPReal& b) noexcept {
  mpfr_swap(a.lo_, b.lo_);
  mpfr_swap(a.hi_, b.hi_);
  std::swap(a.prec_, b.prec_);
}

HPReal HPReal::exact(double x, mpfr_prec_t prec) {
  HPReal r(prec);
  mpfr_set_d(r.lo_, x, MPFR_RNDD);
  mpfr_set_d(r.hi_, x, MPFR_RNDU);
  return r;
}

HPReal HPReal::exact(const mpz_class& n, mpfr_prec_t prec) {
  HPReal r(prec);
  mpfr_set_z(r.lo_, n.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, n.get_mpz_t(), MPFR_RNDU);
  return r;
}

HPReal HPReal::log_of(const mpz_class& n, mpfr_prec_t prec) {
  if (n <= 0) throw std::domain_error("log of nonpositive integer");
  HPReal x = exact(n, prec);
  return x.log();
}

HPReal HPReal::log_of(unsigned long n, mpfr_prec_t prec) {
  return log_of(mpz_class(n), prec);
}

HPReal HPReal::operator+(const HPReal& o) const {
  HPReal r(std::max(prec_, o.prec_));
  mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
  return r;
}

HPReal HPReal::operator-(const HPReal& o) const {
  HPReal r(std::max(prec_, o.prec_));
  mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
  return r;
}

HPReal HPReal::operator-() const {
  HPReal r(prec_);
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

HPReal HPReal::operator*(const HPReal& o) const {
  // General interval product: min/max over the four endpoint products.
  HPReal r(std::max(prec_, o.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr as[2] = {lo_, hi_};
  const mpfr_srcptr bs[2] = {o.lo_, o.hi_};
  bool first = true;
  for (auto a : as)
    for (auto b : bs) {
      mpfr_mul(t, a, b, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, a, b, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

HPReal HPReal::operator/(const HPReal& o) const {
  if (!(o.certainly_positive() || o.certainly_negative()))
    throw std::domain_error("interval division by enclosure containing zero");
  HPReal r(std::max(prec_, o.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr as[2] = {lo_, hi_};
  const mpfr_srcptr bs[2] = {o.lo_, o.hi_};
  bool first = true;
  for (auto a : as)
    for (auto b : bs) {
      mpfr_div(t, a, b, MPFR_RNDD);
      if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, a, b, MPFR_RNDU);
      if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

HPReal HPReal::abs() const {
  if (certainly_positive()) return *this;
  if (certainly_negative()) return -*this;
  HPReal r(prec_);  // straddles zero: [0, max(|lo|, hi)]
  mpfr_set_zero(r.lo_, 1);
  mpfr_abs(r.hi_, lo_, MPFR_RNDU);
  if (mpfr_less_p(r.hi_, hi_)) mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

HPReal HPReal::log() const {
  if (!certainly_positive())
    throw std::domain_error("interval log of enclosure touching zero");
  HPReal r(prec_);
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

HPReal HPReal::mul_ui(unsigned long k) const {
  HPReal r(prec_);
  mpfr_mul_ui(r.lo_, lo_, k, MPFR_RNDD);
  mpfr_mul_ui(r.hi_, hi_, k, MPFR_RNDU);
  if (mpfr_greater_p(r.lo_, r.hi_)) mpfr_swap(r.lo_, r.hi_);  // k==0 safe
  return r;
}

HPReal HPReal::mul_z(const mpz_class& k) const {
  if (k < 0) throw std::invalid_argument("mul_z expects k >= 0");
  HPReal r(prec_);
  mpfr_mul_z(r.lo_, lo_, k.get_mpz_t(), MPFR_RNDD);
  mpfr_mul_z(r.hi_, hi_, k.get_mpz_t(), MPFR_RNDU);
  if (mpfr_greater_p(r.lo_, r.hi_)) mpfr_swap(r.lo_, r.hi_);
  return r;
}

HPReal HPReal::max(const HPReal& a, const HPReal& b) {
  HPReal r(std::max(a.prec_, b.prec_));
  mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

bool HPReal::certainly_less(const HPReal& o) const {
  return mpfr_less_p(hi_, o.lo_);
}

bool HPReal::certainly_greater(const HPReal& o) const {
  return mpfr_greater_p(lo_, o.hi_);
}

bool HPReal::certainly_positive() const { return mpfr_sgn(lo_) > 0; }
bool HPReal::certainly_negative() const { return mpfr_sgn(hi_) < 0; }

std::optional<mpz_class> HPReal::exact_floor() const {
  mpz_class flo, fhi;
  mpfr_get_z(flo.get_mpz_t(), lo_, MPFR_RNDD);
  mpfr_get_z(fhi.get_mpz_t(), hi_, MPFR_RNDD);
  if (flo == fhi) return flo;
  return std::nullopt;
}

double HPReal::lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double HPReal::upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double HPReal::value() const {
  mpfr_t m;
  mpfr_init2(m, prec_);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  double v = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return v;
}

double HPReal::error_bound() const {
  mpfr_t w;
  mpfr_init2(w, prec_);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  double r = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return r;  // full width bounds |true - midpoint| generously
}

}  // namespace sdioph
