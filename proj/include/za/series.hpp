#pragma once

#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "za/rational.hpp"

namespace za {

// Exponent bound that may be infinite. Exponents >= order are unknown;
// an infinite bound means the series is known exactly everywhere.
struct Truncation {
  bool finite = false;
  Rational order;

  static Truncation infinite() { return {}; }
  static Truncation at(Rational o) { return {true, std::move(o)}; }

  Truncation shifted(const Rational& d) const {
    return finite ? at(order + d) : infinite();
  }
  bool allows(const Rational& e) const { return !finite || e < order; }

  friend Truncation min(const Truncation& a, const Truncation& b) {
    if (!a.finite) return b;
    if (!b.finite) return a;
    return at(a.order < b.order ? a.order : b.order);
  }
  // Product rule: an O(z^A) factor against a series of valuation >= B is
  // unknown from A+B on. Infinite on either side defers to the other bound.
  friend Truncation operator+(const Truncation& a, const Truncation& b) {
    if (!a.finite || !b.finite) return infinite();
    return at(a.order + b.order);
  }
  friend bool operator==(const Truncation& a, const Truncation& b) {
    return a.finite == b.finite && (!a.finite || a.order == b.order);
  }
};

template <class C>
struct coeff_traits {
  static C zero() { return C(); }
  static C one() { return C::one_value(); }
  static bool is_exact_zero(const C& c) { return c.is_exact_zero(); }
  static bool known_zero(const C& c) { return c.known_zero(); }
  static bool known_equal(const C& a, const C& b) { return a.known_equal_to(b); }
  static void scale(C& c, const Rational& r) { c.scale_by(r); }
  static std::string render(const C& c) { return "(" + c.str() + ")"; }
};

template <>
struct coeff_traits<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_exact_zero(const Rational& c) { return c.is_zero(); }
  static bool known_zero(const Rational& c) { return c.is_zero(); }
  static bool known_equal(const Rational& a, const Rational& b) { return a == b; }
  static void scale(Rational& c, const Rational& r) { c *= r; }
  static std::string render(const Rational& c) { return c.str(); }
};

// Formal Laurent-type series with exponents on offset + step*Z, offset
// normalized into [0, step). A default-constructed series is the exact
// zero with no variable tag; it adopts the tag of whatever it meets.
// Truncation is explicit state: a coefficient at or past it is unknown,
// and asking for one is an error rather than a silent zero.
template <class C>
class OffsetSeries {
 public:
  using coeff_type = C;
  using traits = coeff_traits<C>;

  OffsetSeries() : var_('\0'), offset_(0), step_(1) {}

  static OffsetSeries zero(char var) {
    OffsetSeries s;
    s.var_ = var;
    return s;
  }

  static OffsetSeries constant(C c) {
    OffsetSeries s;
    if (!traits::is_exact_zero(c)) s.coef_.emplace(0, std::move(c));
    return s;
  }

  static OffsetSeries one_value() { return constant(traits::one()); }

  static OffsetSeries monomial(char var, const Rational& exponent, C c) {
    OffsetSeries s;
    s.var_ = var;
    Rational fl = exponent.floor();
    s.offset_ = exponent - fl;
    if (!traits::is_exact_zero(c)) s.coef_.emplace(fl.to_long(), std::move(c));
    return s;
  }

  char var() const { return var_; }
  const Rational& offset() const { return offset_; }
  long step() const { return step_; }
  const Truncation& truncation() const { return trunc_; }
  bool empty_support() const { return coef_.empty(); }
  size_t term_count() const { return coef_.size(); }

  bool is_exact_zero() const { return coef_.empty() && !trunc_.finite; }
  // Zero at every exponent where this series is known.
  bool known_zero() const { return coef_.empty(); }

  Rational exponent_of(long idx) const {
    return offset_ + Rational(step_) * Rational(idx);
  }

  // Smallest exponent that could carry a nonzero coefficient: the first
  // support point, else the truncation order, else unbounded (exact zero).
  Truncation valuation_bound() const {
    if (!coef_.empty()) return Truncation::at(exponent_of(coef_.begin()->first));
    return trunc_;
  }

  std::optional<Rational> leading_exponent() const {
    if (coef_.empty()) return std::nullopt;
    return exponent_of(coef_.begin()->first);
  }

  C at(const Rational& e) const {
    if (!trunc_.allows(e))
      throw std::domain_error("OffsetSeries: coefficient at " + e.str() +
                              " is beyond truncation");
    Rational rel = (e - offset_) / Rational(step_);
    if (!rel.is_integer()) return traits::zero();
    auto it = coef_.find(rel.to_long());
    return it == coef_.end() ? traits::zero() : it->second;
  }

  void set(const Rational& e, C c) {
    adopt_exponent(e);
    long idx = ((e - offset_) / Rational(step_)).to_long();
    if (traits::is_exact_zero(c))
      coef_.erase(idx);
    else
      coef_[idx] = std::move(c);
  }

  void add_at(const Rational& e, const C& c) {
    if (!trunc_.allows(e)) return;
    if (traits::is_exact_zero(c)) return;
    adopt_exponent(e);
    long idx = ((e - offset_) / Rational(step_)).to_long();
    auto it = coef_.find(idx);
    if (it == coef_.end()) {
      coef_.emplace(idx, c);
    } else {
      it->second = it->second + c;
      if (traits::is_exact_zero(it->second)) coef_.erase(it);
    }
  }

  OffsetSeries truncated(const Rational& order) const {
    OffsetSeries r = *this;
    r.set_truncation(min(r.trunc_, Truncation::at(order)));
    return r;
  }

  void set_truncation(Truncation t) {
    trunc_ = std::move(t);
    for (auto it = coef_.begin(); it != coef_.end();) {
      if (!trunc_.allows(exponent_of(it->first)))
        it = coef_.erase(it);
      else
        ++it;
    }
  }

  // Multiply by var^d.
  OffsetSeries shifted(const Rational& d) const {
    OffsetSeries r;
    r.var_ = var_;
    r.step_ = step_;
    r.trunc_ = trunc_.shifted(d);
    Rational off = offset_ + d;
    Rational st(step_);
    Rational base = (off / st).floor();
    r.offset_ = off - st * base;
    long shift = base.to_long();
    for (const auto& [i, c] : coef_) r.coef_.emplace(i + shift, c);
    return r;
  }

  OffsetSeries scaled(const Rational& f) const {
    OffsetSeries r = *this;
    if (f.is_zero()) {
      r.coef_.clear();
      return r;
    }
    for (auto& [i, c] : r.coef_) traits::scale(c, f);
    return r;
  }

  void scale_by(const Rational& f) {
    if (f.is_zero()) {
      coef_.clear();
      return;
    }
    for (auto& [i, c] : coef_) traits::scale(c, f);
  }

  // Multiply every coefficient by a fixed element of the coefficient ring.
  OffsetSeries times_coeff(const C& f) const {
    OffsetSeries r = *this;
    if (traits::is_exact_zero(f)) {
      r.coef_.clear();
      return r;
    }
    for (auto it = r.coef_.begin(); it != r.coef_.end();) {
      it->second = it->second * f;
      if (traits::is_exact_zero(it->second))
        it = r.coef_.erase(it);
      else
        ++it;
    }
    return r;
  }

  friend OffsetSeries operator+(const OffsetSeries& a, const OffsetSeries& b) {
    OffsetSeries r;
    r.var_ = merged_var(a, b);
    auto [off, step] = merged_lattice(a, b);
    r.offset_ = off;
    r.step_ = step;
    r.trunc_ = min(a.trunc_, b.trunc_);
    for (const auto& [i, c] : a.coef_) r.add_at(a.exponent_of(i), c);
    for (const auto& [i, c] : b.coef_) r.add_at(b.exponent_of(i), c);
    return r;
  }

  friend OffsetSeries operator-(const OffsetSeries& a, const OffsetSeries& b) {
    return a + b.scaled(Rational(-1));
  }

  OffsetSeries operator-() const { return scaled(Rational(-1)); }

  friend OffsetSeries operator*(const OffsetSeries& a, const OffsetSeries& b) {
    OffsetSeries r;
    r.var_ = merged_var(a, b);
    r.step_ = std::gcd(a.step_, b.step_);
    Rational off = a.offset_ + b.offset_;
    Rational st(r.step_);
    Rational base = (off / st).floor();
    r.offset_ = off - st * base;
    r.trunc_ = min(a.trunc_ + b.valuation_bound(), b.trunc_ + a.valuation_bound());
    for (const auto& [i, ca] : a.coef_) {
      Rational ea = a.exponent_of(i);
      for (const auto& [j, cb] : b.coef_) {
        Rational e = ea + b.exponent_of(j);
        if (!r.trunc_.allows(e)) continue;
        r.add_at(e, ca * cb);
      }
    }
    return r;
  }

  friend OffsetSeries operator/(const OffsetSeries& a, const OffsetSeries& b) {
    return a * series_invert(b);
  }

  bool known_equal_to(const OffsetSeries& o) const {
    return !first_difference(*this, o).has_value();
  }

  // Earliest exponent at which the two series demonstrably differ, looking
  // only below both truncation orders.
  friend std::optional<Rational> first_difference(const OffsetSeries& a,
                                                  const OffsetSeries& b) {
    if (a.var_ && b.var_ && a.var_ != b.var_)
      throw std::invalid_argument("OffsetSeries: comparing different variables");
    Truncation common = min(a.trunc_, b.trunc_);
    std::map<Rational, std::pair<const C*, const C*>> merged;
    for (const auto& [i, c] : a.coef_) {
      Rational e = a.exponent_of(i);
      if (common.allows(e)) merged[e].first = &c;
    }
    for (const auto& [i, c] : b.coef_) {
      Rational e = b.exponent_of(i);
      if (common.allows(e)) merged[e].second = &c;
    }
    const C zc = traits::zero();
    for (const auto& [e, pr] : merged) {
      const C& ca = pr.first ? *pr.first : zc;
      const C& cb = pr.second ? *pr.second : zc;
      if (!traits::known_equal(ca, cb)) return e;
    }
    return std::nullopt;
  }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    char v = var_ ? var_ : '_';
    for (const auto& [i, c] : coef_) {
      if (!first) os << " + ";
      first = false;
      os << traits::render(c);
      Rational e = exponent_of(i);
      if (!e.is_zero()) os << "*" << v << "^" << e.str();
    }
    if (first) os << "0";
    if (trunc_.finite) os << " + O(" << v << "^" << trunc_.order.str() << ")";
    return os.str();
  }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [i, c] : coef_) f(exponent_of(i), c);
  }

 private:
  static char merged_var(const OffsetSeries& a, const OffsetSeries& b) {
    if (a.var_ && b.var_ && a.var_ != b.var_)
      throw std::invalid_argument("OffsetSeries: variable tags differ");
    return a.var_ ? a.var_ : b.var_;
  }

  bool default_lattice_no_support() const {
    return coef_.empty() && offset_.is_zero() && step_ == 1;
  }

  // Smallest common lattice; offsets must differ by an integer.
  static std::pair<Rational, long> merged_lattice(const OffsetSeries& a,
                                                  const OffsetSeries& b) {
    if (a.default_lattice_no_support()) return {b.offset_, b.step_};
    if (b.default_lattice_no_support()) return {a.offset_, a.step_};
    Rational d = a.offset_ - b.offset_;
    if (!d.is_integer())
      throw std::domain_error("OffsetSeries: incompatible exponent lattices (" +
                              a.offset_.str() + " vs " + b.offset_.str() + ")");
    long step = std::gcd(a.step_, b.step_);
    long di = d.to_long();
    if (di != 0) step = std::gcd(step, std::abs(di));
    Rational st(step);
    Rational off = a.offset_ - st * (a.offset_ / st).floor();
    return {off, step};
  }

  // Refine this lattice so exponent e lands on it. An empty-support series
  // on the default lattice has no structure to preserve and just re-anchors.
  void adopt_exponent(const Rational& e) {
    Rational rel = (e - offset_) / Rational(step_);
    if (rel.is_integer()) return;
    if (coef_.empty() && offset_.is_zero() && step_ == 1) {
      Rational fl = e.floor();
      offset_ = e - fl;
      return;
    }
    Rational d = e - offset_;
    if (!d.is_integer())
      throw std::domain_error("OffsetSeries: exponent " + e.str() +
                              " off the lattice (offset " + offset_.str() +
                              ", step " + std::to_string(step_) + ")");
    long nstep = std::gcd(step_, std::abs(d.to_long()));
    Rational nst(nstep);
    Rational noff = offset_ - nst * (offset_ / nst).floor();
    std::map<long, C> moved;
    for (auto& [i, c] : coef_) {
      long ni = ((exponent_of(i) - noff) / nst).to_long();
      moved.emplace(ni, std::move(c));
    }
    offset_ = noff;
    step_ = nstep;
    coef_ = std::move(moved);
  }

  char var_;
  Rational offset_;
  long step_;
  std::map<long, C> coef_;
  Truncation trunc_;
};

// 1/b. Needs a nonzero leading coefficient within truncation; a non-monomial
// with infinite truncation has no finite inverse representation.
template <class C>
OffsetSeries<C> series_invert(const OffsetSeries<C>& b) {
  using traits = coeff_traits<C>;
  auto lead_e = b.leading_exponent();
  if (!lead_e)
    throw std::domain_error("series_invert: no leading coefficient within truncation");
  Rational v = *lead_e;
  OffsetSeries<C> bl = b.shifted(-v);
  C lead = bl.at(Rational(0));
  C inv_lead = traits::one() / lead;
  OffsetSeries<C> u =
      OffsetSeries<C>::one_value() - bl.times_coeff(inv_lead);
  Truncation tb = bl.truncation();
  if (!tb.finite && !u.empty_support())
    throw std::domain_error("series_invert: needs a truncation order");
  OffsetSeries<C> res = OffsetSeries<C>::one_value();
  OffsetSeries<C> term = OffsetSeries<C>::one_value();
  while (true) {
    term = term * u;
    if (term.empty_support()) break;
    res = res + term;
  }
  res.set_truncation(tb);
  return res.times_coeff(inv_lead).shifted(-v);
}

// exp of a series with zero offset and strictly positive valuation.
template <class C>
OffsetSeries<C> series_exp(const OffsetSeries<C>& a) {
  if (a.is_exact_zero()) {
    auto r = OffsetSeries<C>::one_value();
    return r;
  }
  if (!a.offset().is_zero())
    throw std::domain_error("series_exp: fractional exponent offset");
  auto le = a.leading_exponent();
  if (le && *le <= Rational(0))
    throw std::domain_error("series_exp: nonzero constant term");
  if (!a.truncation().finite)
    throw std::domain_error("series_exp: needs a truncation order");
  OffsetSeries<C> res = OffsetSeries<C>::one_value();
  OffsetSeries<C> term = OffsetSeries<C>::one_value();
  long r = 1;
  while (true) {
    term = term * a;
    term.scale_by(Rational(1, r));
    if (term.empty_support()) break;
    res = res + term;
    ++r;
  }
  res.set_truncation(a.truncation());
  return res;
}

// log of a series with leading term exactly 1 at exponent 0.
template <class C>
OffsetSeries<C> series_log(const OffsetSeries<C>& a) {
  using traits = coeff_traits<C>;
  auto lead_e = a.leading_exponent();
  if (!lead_e || !lead_e->is_zero() ||
      !traits::known_equal(a.at(Rational(0)), traits::one()))
    throw std::domain_error("series_log: leading term must be 1");
  OffsetSeries<C> u = a - OffsetSeries<C>::one_value();
  if (!a.truncation().finite && !u.empty_support())
    throw std::domain_error("series_log: needs a truncation order");
  OffsetSeries<C> res;
  OffsetSeries<C> term = OffsetSeries<C>::one_value();
  long r = 1;
  while (true) {
    term = term * u;
    if (term.empty_support()) break;
    res = res + term.scaled(Rational(r % 2 == 1 ? 1 : -1, r));
    ++r;
  }
  res.set_truncation(a.truncation());
  return res;
}

// a^r for rational r. The leading monomial var^v (unit coefficient required)
// goes to var^{rv} in the offset; the rest is exp(r log(..)).
template <class C>
OffsetSeries<C> series_pow(const OffsetSeries<C>& a, const Rational& r) {
  using traits = coeff_traits<C>;
  auto lead_e = a.leading_exponent();
  if (!lead_e) {
    if (a.is_exact_zero() && r.sign() > 0) return a;
    throw std::domain_error("series_pow: no leading term within truncation");
  }
  Rational v = *lead_e;
  OffsetSeries<C> b1 = a.shifted(-v);
  if (!traits::known_equal(b1.at(Rational(0)), traits::one()))
    throw std::domain_error("series_pow: nonunit leading coefficient");
  if (r.is_zero()) {
    auto res = OffsetSeries<C>::one_value();
    res.set_truncation(b1.truncation());
    return res;
  }
  OffsetSeries<C> w;
  if (b1.term_count() == 1) {
    w = OffsetSeries<C>::one_value();
    w.set_truncation(b1.truncation());
  } else {
    w = series_exp(series_log(b1).scaled(r));
  }
  return w.shifted(r * v);
}

// D = var d/dvar: coefficient at exponent e scales by e (offset included).
template <class C>
OffsetSeries<C> series_D(const OffsetSeries<C>& a) {
  OffsetSeries<C> r = a.scaled(Rational(0));
  a.for_each([&](const Rational& e, const C& c) {
    C sc = c;
    coeff_traits<C>::scale(sc, e);
    r.add_at(e, sc);
  });
  return r;
}

// var -> -var. Only integer exponent lattices carry a canonical sign.
template <class C>
OffsetSeries<C> negate_variable(const OffsetSeries<C>& a) {
  if (!a.offset().is_integer())
    throw std::domain_error("negate_variable: fractional offset has no canonical sign");
  OffsetSeries<C> r = OffsetSeries<C>::zero(a.var());
  r.set_truncation(a.truncation());
  a.for_each([&](const Rational& e, const C& c) {
    long ei = e.to_long();
    C sc = c;
    if (ei % 2 != 0) coeff_traits<C>::scale(sc, Rational(-1));
    r.add_at(e, sc);
  });
  return r;
}

// var -> var^m, m a positive integer.
template <class C>
OffsetSeries<C> power_substitute(const OffsetSeries<C>& a, long m) {
  if (m <= 0) throw std::domain_error("power_substitute: exponent must be positive");
  OffsetSeries<C> r = OffsetSeries<C>::zero(a.var());
  Rational rm(m);
  if (a.truncation().finite)
    r.set_truncation(Truncation::at(a.truncation().order * rm));
  a.for_each([&](const Rational& e, const C& c) { r.add_at(e * rm, c); });
  return r;
}

// var -> aux*var: lifts a univariate series to a bivariate one whose inner
// coefficients are monomials aux^e.
inline OffsetSeries<OffsetSeries<Rational>> scale_variable_by(
    const OffsetSeries<Rational>& a, char aux) {
  using Inner = OffsetSeries<Rational>;
  OffsetSeries<Inner> r = OffsetSeries<Inner>::zero(a.var());
  r.set_truncation(a.truncation());
  a.for_each([&](const Rational& e, const Rational& c) {
    r.add_at(e, Inner::monomial(aux, e, c));
  });
  return r;
}

using RatSeries = OffsetSeries<Rational>;
using BiSeries = OffsetSeries<RatSeries>;

}  // namespace za
