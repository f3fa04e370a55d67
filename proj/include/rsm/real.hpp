#pragma once
// Arbitrary-precision real numbers: a thin value-semantics wrapper around
// MPFR.  Precision is a process-wide default (bits) captured at construction
// time; intermediate results inherit the larger precision of their operands.

#include <mpfr.h>
#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsm {

class Real {
public:
  // Process-wide default precision in bits for newly created values.
  static mpfr_prec_t default_precision() { return default_prec_; }
  static void set_default_precision(mpfr_prec_t bits) {
    if (bits < 16 || bits > 16384) throw std::invalid_argument("precision out of range");
    default_prec_ = bits;
  }

  Real() { mpfr_init2(v_, default_prec_); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec, int /*tag*/) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(long x) { mpfr_init2(v_, default_prec_); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x) : Real(static_cast<long>(x)) {}
  Real(unsigned long x) { mpfr_init2(v_, default_prec_); mpfr_set_ui(v_, x, MPFR_RNDN); }
  Real(double x) { mpfr_init2(v_, default_prec_); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Real(const std::string& s) {
    mpfr_init2(v_, default_prec_);
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw std::invalid_argument("unparsable real literal: " + s);
  }
  explicit Real(const mpz_class& z) { mpfr_init2(v_, default_prec_); mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN); }
  explicit Real(const mpq_class& q) {
    mpfr_init2(v_, default_prec_);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }

  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, 16); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  std::string str(int digits = 0) const {
    if (digits <= 0) digits = static_cast<int>(precision() * 0.30103) + 2;
    char fmt[32], *out = nullptr;
    std::snprintf(fmt, sizeof fmt, "%%.%dRg", digits);
    if (mpfr_asprintf(&out, fmt, v_) < 0) return "?";
    std::string s(out);
    mpfr_free_str(out);
    return s;
  }

  friend Real operator+(const Real& a, const Real& b) { Real r(work_prec(a, b), 0); mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a, const Real& b) { Real r(work_prec(a, b), 0); mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, const Real& b) { Real r(work_prec(a, b), 0); mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator/(const Real& a, const Real& b) { Real r(work_prec(a, b), 0); mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a) { Real r(a.precision(), 0); mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

  friend Real operator+(const Real& a, long b) { Real r(a.precision(), 0); mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator+(long a, const Real& b) { return b + a; }
  friend Real operator-(const Real& a, long b) { Real r(a.precision(), 0); mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator-(long a, const Real& b) { Real r(b.precision(), 0); mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, long b) { Real r(a.precision(), 0); mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, long b) { Real r(a.precision(), 0); mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator/(long a, const Real& b) { Real r(b.precision(), 0); mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN); return r; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) == 0; }
  friend bool operator<(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) < 0; }
  friend bool operator>(const Real& a, long b) { return mpfr_cmp_si(a.v_, b) > 0; }

private:
  static mpfr_prec_t work_prec(const Real& a, const Real& b) {
    mpfr_prec_t p = a.precision(), q = b.precision();
    return p > q ? p : q;
  }
  static inline mpfr_prec_t default_prec_ = 128;
  mpfr_t v_;
};

// RAII guard for temporarily raising the default precision.
class PrecisionGuard {
public:
  explicit PrecisionGuard(mpfr_prec_t bits) : saved_(Real::default_precision()) {
    Real::set_default_precision(bits);
  }
  ~PrecisionGuard() { Real::set_default_precision(saved_); }
private:
  mpfr_prec_t saved_;
};

inline Real abs(const Real& a) { Real r(a.precision(), 0); mpfr_abs(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real sqrt(const Real& a) { Real r(a.precision(), 0); mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real exp(const Real& a) { Real r(a.precision(), 0); mpfr_exp(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real log(const Real& a) { Real r(a.precision(), 0); mpfr_log(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real sin(const Real& a) { Real r(a.precision(), 0); mpfr_sin(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real cos(const Real& a) { Real r(a.precision(), 0); mpfr_cos(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real atan2(const Real& y, const Real& x) { Real r; mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN); return r; }
inline Real floor(const Real& a) { Real r(a.precision(), 0); mpfr_rint_floor(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real pow(const Real& a, const Real& b) { Real r; mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
inline Real pow(const Real& a, long n) { Real r(a.precision(), 0); mpfr_pow_si(r.raw(), a.raw(), n, MPFR_RNDN); return r; }
inline Real hypot(const Real& a, const Real& b) { Real r; mpfr_hypot(r.raw(), a.raw(), b.raw(), MPFR_RNDN); return r; }
inline Real const_pi() { Real r; mpfr_const_pi(r.raw(), MPFR_RNDN); return r; }
inline Real gamma(const Real& a) { Real r(a.precision(), 0); mpfr_gamma(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real lgamma_abs(const Real& a) { Real r(a.precision(), 0); int s; mpfr_lgamma(r.raw(), &s, a.raw(), MPFR_RNDN); return r; }
inline Real digamma(const Real& a) { Real r(a.precision(), 0); mpfr_digamma(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real zeta(const Real& a) { Real r(a.precision(), 0); mpfr_zeta(r.raw(), a.raw(), MPFR_RNDN); return r; }
inline Real bessel_jn(long n, const Real& x) { Real r(x.precision(), 0); mpfr_jn(r.raw(), n, x.raw(), MPFR_RNDN); return r; }
inline Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
inline Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

}  // namespace rsm
