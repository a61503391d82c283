#include "adic/rational.hpp"

#include <ostream>

#include "adic/error.hpp"

namespace adic {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::NotInSubgroup: return "NotInSubgroup";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::EpsilonTooCoarse: return "EpsilonTooCoarse";
    case ErrorKind::NoValidK: return "NoValidK";
    case ErrorKind::MultiplierDegenerate: return "MultiplierDegenerate";
    case ErrorKind::DomainExhausted: return "DomainExhausted";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::BoundaryStraddle: return "BoundaryStraddle";
    case ErrorKind::OverlapError: return "OverlapError";
    case ErrorKind::ContainmentFailure: return "ContainmentFailure";
    case ErrorKind::ScheduleError: return "ScheduleError";
    case ErrorKind::NoContainingInterval: return "NoContainingInterval";
    case ErrorKind::FactorizationLimit: return "FactorizationLimit";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  if (s.empty()) fail(ErrorKind::ParseError, "empty integer");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) fail(ErrorKind::ParseError, "malformed integer '" + s + "'");
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') fail(ErrorKind::ParseError, "malformed integer '" + s + "'");
  }
  if (s[0] == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

std::string to_string(const BigInt& value) { return value.get_str(10); }

BigInt pow(const BigInt& base, unsigned long exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

BigInt pow(long base, unsigned long exponent) { return pow(BigInt(base), exponent); }

Rational::Rational(const BigInt& numerator, const BigInt& denominator) {
  if (denominator == 0) fail(ErrorKind::InvalidArgument, "zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(long numerator, long denominator)
    : Rational(BigInt(numerator), BigInt(denominator)) {}

Rational::Rational(const mpq_class& value) : value_(value) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_bigint(text));
  BigInt den = parse_bigint(text.substr(slash + 1));
  if (den == 0) fail(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  return Rational(parse_bigint(text.substr(0, slash)), den);
}

std::string Rational::str() const {
  return value_.get_num().get_str(10) + "/" + value_.get_den().get_str(10);
}

BigInt Rational::floor() const {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return out;
}

BigInt Rational::ceil() const {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return out;
}

Rational& Rational::operator+=(const Rational& rhs) {
  value_ += rhs.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.sign() == 0) fail(ErrorKind::InvalidArgument, "division by zero");
  value_ /= rhs.value_;
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

Rational abs(const Rational& value) { return value.sign() < 0 ? -value : value; }

Rational pow(const Rational& base, long exponent) {
  if (exponent < 0) {
    if (base.sign() == 0) fail(ErrorKind::InvalidArgument, "zero to a negative power");
    return Rational(pow(base.denominator(), static_cast<unsigned long>(-exponent)),
                    pow(base.numerator(), static_cast<unsigned long>(-exponent)));
  }
  auto e = static_cast<unsigned long>(exponent);
  return Rational(pow(base.numerator(), e), pow(base.denominator(), e));
}

Rational power_of(long base, long exponent) { return pow(Rational(base), exponent); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

std::ostream& operator<<(std::ostream& os, const Rational& value) { return os << value.str(); }

}  // namespace adic
