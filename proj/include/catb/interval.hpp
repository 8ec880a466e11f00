#pragma once

#include <mpfr.h>

#include "rational.hpp"

namespace catb {

// Outcome of an interval-certified comparison.
enum class Cert { holds, fails, undecided };

namespace detail {

class Mpfr {
 public:
  explicit Mpfr(unsigned bits) { mpfr_init2(v_, static_cast<mpfr_prec_t>(bits)); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

// exp is increasing, so the rounding direction of the argument carries over.
inline void exp_of_rational(mpfr_ptr out, const Rational& a, mpfr_rnd_t rnd) {
  mpfr_set_q(out, a.backend().data(), rnd);
  mpfr_exp(out, out, rnd);
}

}  // namespace detail

// Decides e^a <= k*e^b + m*e^c (rational exponents, integer k, m >= 0) by
// directed rounding at the given precision.
inline Cert certify_exp_le(const Rational& a, long k, const Rational& b, long m,
                           const Rational& c, unsigned bits) {
  detail::Mpfr lhs(bits), t1(bits), t2(bits), rhs(bits);
  detail::exp_of_rational(lhs.get(), a, MPFR_RNDU);
  detail::exp_of_rational(t1.get(), b, MPFR_RNDD);
  detail::exp_of_rational(t2.get(), c, MPFR_RNDD);
  mpfr_mul_si(t1.get(), t1.get(), k, MPFR_RNDD);
  mpfr_mul_si(t2.get(), t2.get(), m, MPFR_RNDD);
  mpfr_add(rhs.get(), t1.get(), t2.get(), MPFR_RNDD);
  if (mpfr_cmp(lhs.get(), rhs.get()) <= 0) return Cert::holds;

  detail::exp_of_rational(lhs.get(), a, MPFR_RNDD);
  detail::exp_of_rational(t1.get(), b, MPFR_RNDU);
  detail::exp_of_rational(t2.get(), c, MPFR_RNDU);
  mpfr_mul_si(t1.get(), t1.get(), k, MPFR_RNDU);
  mpfr_mul_si(t2.get(), t2.get(), m, MPFR_RNDU);
  mpfr_add(rhs.get(), t1.get(), t2.get(), MPFR_RNDU);
  if (mpfr_cmp(lhs.get(), rhs.get()) > 0) return Cert::fails;
  return Cert::undecided;
}

// Triangle inequality in the linear domain: e^{ik} <= e^{ij} + e^{jk}.
inline Cert certify_exp_triangle(const Rational& ik, const Rational& ij, const Rational& jk,
                                 unsigned bits) {
  return certify_exp_le(ik, 1, ij, 1, jk, bits);
}

// |e^{d1} - e^{d2}| <= m * e^{bound}
inline Cert certify_exp_diff_le(const Rational& d1, const Rational& d2, long m,
                                const Rational& bound, unsigned bits) {
  Cert first = certify_exp_le(d1, 1, d2, m, bound, bits);
  if (first != Cert::holds) return first;
  return certify_exp_le(d2, 1, d1, m, bound, bits);
}

}  // namespace catb
