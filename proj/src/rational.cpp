#include "ordpoly/rational.hpp"

#include <cctype>
#include <cmath>

#include "ordpoly/errors.hpp"

namespace ordpoly {

namespace {

mpz_class pow10(long exponent) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
  return out;
}

// Round a non-negative rational to the nearest integer, ties to even.
mpz_class round_half_even(const mpq_class& value) {
  mpz_class q;
  mpz_class r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  const mpz_class twice = 2 * r;
  const int c = cmp(twice, value.get_den());
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()) != 0)) {
    q += 1;
  }
  return q;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

}  // namespace

Rational::Rational(long long value) : value_(static_cast<long>(value)) {
  static_assert(sizeof(long) == sizeof(long long));
}

Rational::Rational(unsigned long long value) : value_(static_cast<unsigned long>(value)) {
  static_assert(sizeof(unsigned long) == sizeof(unsigned long long));
}

Rational::Rational(const mpz_class& numerator, const mpz_class& denominator)
    : value_(numerator, denominator) {
  if (denominator == 0) throw InputError("rational with zero denominator");
  value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const auto bad = [&] { return InputError("malformed rational '" + std::string(text) + "'"); };
  if (s.empty()) throw bad();

  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  mpq_class value;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = s.substr(0, slash);
    const auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw bad();
    const mpz_class d(std::string(den), 10);
    if (d == 0) throw bad();
    value = mpq_class(mpz_class(std::string(num), 10), d);
  } else if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto whole = s.substr(0, dot);
    const auto frac = s.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw bad();
    }
    const mpz_class scale = pow10(static_cast<long>(frac.size()));
    mpz_class digits(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    value = mpq_class(digits, scale);
  } else {
    if (!all_digits(s)) throw bad();
    value = mpq_class(mpz_class(std::string(s), 10));
  }
  value.canonicalize();
  if (negative) value = -value;
  return Rational(std::move(value));
}

double Rational::to_double() const {
  const double d = value_.get_d();
  if (!std::isfinite(d)) return d;
  // get_d truncates, so the nearest double is d or its neighbour away from zero
  const double away = std::nextafter(d, sgn(value_) < 0 ? -HUGE_VAL : HUGE_VAL);
  if (!std::isfinite(away)) return d;
  const mpq_class err_d = abs(value_ - mpq_class(d));
  const mpq_class err_away = abs(value_ - mpq_class(away));
  return err_away < err_d ? away : d;
}

std::string Rational::to_decimal(int digits) const {
  if (digits < 1) digits = 1;
  if (is_zero()) return "0";
  const bool negative = sign() < 0;
  const mpq_class a = negative ? mpq_class(-value_) : value_;

  // Locate e with 10^e <= a < 10^(e+1).
  const double log10_estimate =
      (static_cast<double>(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
       static_cast<double>(mpz_sizeinbase(a.get_den_mpz_t(), 2))) *
      std::log10(2.0);
  long e = static_cast<long>(std::floor(log10_estimate));
  const auto power = [](long k) {
    return k >= 0 ? mpq_class(pow10(k)) : mpq_class(mpz_class(1), pow10(-k));
  };
  while (cmp(a, power(e)) < 0) --e;
  while (cmp(a, power(e + 1)) >= 0) ++e;

  mpz_class n = round_half_even(a * power(digits - 1 - e));
  if (n == pow10(digits)) {
    n /= 10;
    ++e;
  }
  std::string mantissa = n.get_str();  // exactly `digits` characters

  std::string out = negative ? "-" : "";
  if (e >= -7 && e < 21) {
    std::string body;
    if (e >= 0) {
      if (static_cast<long>(mantissa.size()) <= e + 1) {
        body = mantissa + std::string(static_cast<std::size_t>(e + 1) - mantissa.size(), '0');
      } else {
        body = mantissa.substr(0, static_cast<std::size_t>(e + 1)) + "." +
               mantissa.substr(static_cast<std::size_t>(e + 1));
      }
    } else {
      body = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + mantissa;
    }
    if (body.find('.') != std::string::npos) {
      while (body.back() == '0') body.pop_back();
      if (body.back() == '.') body.pop_back();
    }
    return out + body;
  }
  std::string body = mantissa.substr(0, 1);
  std::string rest = mantissa.substr(1);
  while (!rest.empty() && rest.back() == '0') rest.pop_back();
  if (!rest.empty()) body += "." + rest;
  return out + body + "e" + (e < 0 ? "-" : "+") + std::to_string(e < 0 ? -e : e);
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
  if (rhs.is_zero()) throw std::domain_error("rational division by zero");
  value_ /= rhs.value_;
  return *this;
}

Rational Rational::operator-() const { return Rational(mpq_class(-value_)); }

std::size_t Rational::hash() const {
  const auto limb_hash = [](const mpz_class& z) {
    std::size_t h = static_cast<std::size_t>(sgn(z)) * 0x9e3779b97f4a7c15ULL;
    const std::size_t n = mpz_size(z.get_mpz_t());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i))) +
           0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  };
  return limb_hash(value_.get_num()) * 31 + limb_hash(value_.get_den());
}

Rational pow(const Rational& base, unsigned exponent) {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), exponent);
  // Powers of a reduced fraction stay reduced.
  mpq_class out;
  out.get_num() = num;
  out.get_den() = den;
  return Rational(std::move(out));
}

Rational abs(const Rational& value) { return value.sign() < 0 ? -value : value; }

Rational factorial(unsigned n) {
  mpz_class out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return Rational(mpq_class(out));
}

Rational binomial(unsigned n, unsigned k) {
  mpz_class out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return Rational(mpq_class(out));
}

}  // namespace ordpoly
