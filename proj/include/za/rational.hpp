#pragma once

#include <gmp.h>

#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace za {

// Arbitrary-precision rational, always reduced with positive denominator.
// The only scalar type used by the exact verification core.
class Rational {
 public:
  Rational() { mpq_init(v_); }

  Rational(long n) {
    mpq_init(v_);
    mpq_set_si(v_, n, 1);
  }

  Rational(int n) : Rational(static_cast<long>(n)) {}

  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    mpq_init(v_);
    mpq_set_si(v_, num, 1);
    mpq_t d;
    mpq_init(d);
    mpq_set_si(d, den, 1);
    mpq_div(v_, v_, d);
    mpq_clear(d);
  }

  // Accepts "p", "-p", "p/q"; whitespace is not tolerated.
  explicit Rational(std::string_view s) {
    mpq_init(v_);
    std::string buf(s);
    if (buf.empty() || mpq_set_str(v_, buf.c_str(), 10) != 0)
      throw std::invalid_argument("Rational: cannot parse '" + buf + "'");
    if (mpz_sgn(mpq_denref(v_)) == 0) {
      mpq_clear(v_);
      mpq_init(v_);
      throw std::domain_error("Rational: zero denominator in '" + buf + "'");
    }
    mpq_canonicalize(v_);
  }

  Rational(const Rational& o) {
    mpq_init(v_);
    mpq_set(v_, o.v_);
  }

  Rational(Rational&& o) noexcept {
    mpq_init(v_);
    mpq_swap(v_, o.v_);
  }

  Rational& operator=(const Rational& o) {
    if (this != &o) mpq_set(v_, o.v_);
    return *this;
  }

  Rational& operator=(Rational&& o) noexcept {
    mpq_swap(v_, o.v_);
    return *this;
  }

  ~Rational() { mpq_clear(v_); }

  Rational& operator+=(const Rational& o) {
    mpq_add(v_, v_, o.v_);
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    mpq_sub(v_, v_, o.v_);
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    mpq_mul(v_, v_, o.v_);
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    mpq_div(v_, v_, o.v_);
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  Rational operator-() const {
    Rational r;
    mpq_neg(r.v_, v_);
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return mpq_equal(a.v_, b.v_) != 0;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = mpq_cmp(a.v_, b.v_);
    return c <=> 0;
  }

  bool is_zero() const { return mpq_sgn(v_) == 0; }
  int sign() const { return mpq_sgn(v_); }
  bool is_integer() const { return mpz_cmp_ui(mpq_denref(v_), 1) == 0; }

  // Requires an integer value that fits in long.
  long to_long() const {
    if (!is_integer()) throw std::domain_error("Rational: not an integer: " + str());
    if (!mpz_fits_slong_p(mpq_numref(v_)))
      throw std::domain_error("Rational: integer out of long range");
    return mpz_get_si(mpq_numref(v_));
  }

  Rational floor() const {
    Rational r;
    mpz_fdiv_q(mpq_numref(r.v_), mpq_numref(v_), mpq_denref(v_));
    mpz_set_ui(mpq_denref(r.v_), 1);
    return r;
  }

  // v^e with e possibly negative (then v must be nonzero).
  Rational pow_int(long e) const {
    if (e == 0) return Rational(1);
    if (is_zero()) {
      if (e < 0) throw std::domain_error("Rational: 0 to a negative power");
      return Rational(0);
    }
    Rational r;
    unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(mpq_numref(r.v_), mpq_numref(v_), ae);
    mpz_pow_ui(mpq_denref(r.v_), mpq_denref(v_), ae);
    if (e < 0) mpq_inv(r.v_, r.v_);
    mpq_canonicalize(r.v_);
    return r;
  }

  Rational numerator() const {
    Rational r;
    mpq_set_z(r.v_, mpq_numref(v_));
    return r;
  }
  Rational denominator() const {
    Rational r;
    mpq_set_z(r.v_, mpq_denref(v_));
    return r;
  }

  std::string str() const {
    char* s = mpq_get_str(nullptr, 10, v_);
    std::string out(s);
    void (*freefn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefn);
    freefn(s, out.size() + 1);
    return out;
  }

  double to_double() const { return mpq_get_d(v_); }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  mpq_t v_;
};

inline Rational parse_rational(std::string_view s) { return Rational(s); }

}  // namespace za
