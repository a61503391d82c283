#include "adic/enclosure.hpp"

#include <gmp.h>
#include <mpfr.h>

#include "adic/error.hpp"

namespace adic {

namespace {

// RAII wrapper around an mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(long precision) { mpfr_init2(v_, precision); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

  void set(const Rational& x, mpfr_rnd_t rnd) { mpfr_set_q(v_, x.raw().get_mpq_t(), rnd); }

  // Exact conversion of the (finite) value back to a rational.
  Rational to_rational() {
    require(mpfr_number_p(v_) != 0, "non-finite value in enclosure");
    if (mpfr_zero_p(v_)) return Rational(0);
    BigInt mantissa;
    long exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), v_);
    if (exponent >= 0) return Rational(BigInt(mantissa << static_cast<unsigned long>(exponent)));
    return Rational(mantissa, BigInt(BigInt(1) << static_cast<unsigned long>(-exponent)));
  }

 private:
  mpfr_t v_;
};

using Unary = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

// Applies an increasing function to both ends with outward rounding.
Enclosure monotone(const Enclosure& x, Unary f, long precision) {
  Mpfr lo(precision), hi(precision);
  lo.set(x.lo, MPFR_RNDD);
  hi.set(x.hi, MPFR_RNDU);
  f(lo.get(), lo.get(), MPFR_RNDD);
  f(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

}  // namespace

Enclosure::Enclosure(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  require(lo <= hi, "enclosure needs lo <= hi");
}

int Enclosure::certain_sign() const {
  if (lo.sign() > 0) return 1;
  if (hi.sign() < 0) return -1;
  if (lo.sign() == 0 && hi.sign() == 0) return 0;
  return kUncertain;
}

std::string Enclosure::str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }

Enclosure operator+(const Enclosure& a, const Enclosure& b) { return {a.lo + b.lo, a.hi + b.hi}; }

Enclosure operator-(const Enclosure& a, const Enclosure& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {min(min(p1, p2), min(p3, p4)), max(max(p1, p2), max(p3, p4))};
}

Enclosure operator/(const Enclosure& a, const Enclosure& b) {
  require(b.lo.sign() > 0 || b.hi.sign() < 0, "division by an enclosure containing zero");
  return a * Enclosure(Rational(1) / b.hi, Rational(1) / b.lo);
}

Enclosure operator*(const Rational& c, const Enclosure& a) {
  if (c.sign() >= 0) return {c * a.lo, c * a.hi};
  return {c * a.hi, c * a.lo};
}

Enclosure log_enclosure(const Rational& x, long precision) { return log_enclosure(Enclosure(x), precision); }

Enclosure log_enclosure(const Enclosure& x, long precision) {
  require(x.lo.sign() > 0, "log of a non-positive enclosure");
  if (x.lo == Rational(1) && x.hi == Rational(1)) return Enclosure(Rational(0));
  return monotone(x, mpfr_log, precision);
}

Enclosure exp_enclosure(const Enclosure& x, long precision) {
  if (x.lo.sign() == 0 && x.hi.sign() == 0) return Enclosure(Rational(1));
  return monotone(x, mpfr_exp, precision);
}

Enclosure root_enclosure(const Enclosure& x, unsigned long n, long precision) {
  require(x.lo.sign() >= 0, "root of a negative enclosure");
  require(n >= 1, "root index must be positive");
  if (n == 1) return x;
  Mpfr lo(precision), hi(precision);
  lo.set(x.lo, MPFR_RNDD);
  hi.set(x.hi, MPFR_RNDU);
  mpfr_rootn_ui(lo.get(), lo.get(), n, MPFR_RNDD);
  mpfr_rootn_ui(hi.get(), hi.get(), n, MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

Enclosure pow_enclosure(const Rational& x, const Rational& r, long precision) {
  return pow_enclosure(Enclosure(x), r, precision);
}

Enclosure pow_enclosure(const Enclosure& x, const Rational& r, long precision) {
  require(x.lo.sign() > 0, "power of a non-positive enclosure");
  if (r.is_integer() && abs(r) <= Rational(64)) {
    long e = r.numerator().get_si();
    Rational a = pow(x.lo, e), b = pow(x.hi, e);
    return {min(a, b), max(a, b)};
  }
  return exp_enclosure(r * log_enclosure(x, precision), precision);
}

double to_double(const Enclosure& e) { return e.mid().to_double(); }

}  // namespace adic
