#pragma once
// Complex values over Real with a conservatively propagated absolute-error
// bound, plus exact root-of-unity angles ("turns") used by character
// arithmetic.  The error bound is bookkeeping, not interval arithmetic: every
// operation adds its own worst-case rounding to the inherited bounds.

#include "rsm/real.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace rsm {

// An exact angle num/den of a full turn, kept in lowest terms with
// 0 <= num < den.  Represents the root of unity e^{2 pi i num/den}.
struct Turn {
  long num = 0;
  long den = 1;

  static Turn make(long n, long d) {
    if (d <= 0) { n = -n; d = -d; }
    n %= d;
    if (n < 0) n += d;
    long g = std::gcd(n, d);
    if (g == 0) g = 1;
    return Turn{n / g, d / g};
  }
  Turn plus(const Turn& o) const { return make(num * o.den + o.num * den, den * o.den); }
  Turn times(long k) const { return make(num * (k % den), den); }
  Turn conj() const { return make(-num, den); }
  bool is_one() const { return num == 0; }
  bool is_real() const { return 2 * num % den == 0; }  // value is +1 or -1
  friend bool operator==(const Turn&, const Turn&) = default;
};

class Cplx {
public:
  Real re, im;
  // Absolute error bound (conservative); 0 means exact to working rounding.
  double err = 0.0;

  Cplx() : re(0L), im(0L) {}
  Cplx(Real r, Real i, double e = 0.0) : re(std::move(r)), im(std::move(i)), err(e) {}
  Cplx(long r) : re(r), im(0L) {}
  Cplx(int r) : re(static_cast<long>(r)), im(0L) {}
  Cplx(double r) : re(r), im(0L) {}
  explicit Cplx(const Real& r) : re(r), im(0L) {}

  static Cplx i() { return Cplx(Real(0L), Real(1L)); }

  // e^{2 pi i t} for an exact turn t.  Multiples of a quarter turn are exact.
  static Cplx unit(const Turn& t) {
    if (t.den == 1) return Cplx(1L);
    if (t.den == 2) return Cplx(-1L);
    if (t.den == 4) return t.num == 1 ? Cplx(Real(0L), Real(1L)) : Cplx(Real(0L), Real(-1L));
    Real ang = const_pi() * Real(2 * t.num) / t.den;
    Cplx z(cos(ang), sin(ang));
    z.err = ulp_of(1.0);
    return z;
  }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  double mag_d() const {
    double a = re.to_double(), b = im.to_double();
    return std::abs(a) + std::abs(b);
  }
  Real abs() const { return hypot(re, im); }
  Cplx conj() const { return Cplx(re, -im, err); }

  static double ulp_of(double mag) {
    double eps = std::ldexp(1.0, 2 - static_cast<int>(Real::default_precision()));
    return std::abs(mag) * eps;
  }

  friend Cplx operator+(const Cplx& a, const Cplx& b) {
    Cplx r(a.re + b.re, a.im + b.im, a.err + b.err);
    r.err += ulp_of(r.mag_d());
    return r;
  }
  friend Cplx operator-(const Cplx& a, const Cplx& b) {
    Cplx r(a.re - b.re, a.im - b.im, a.err + b.err);
    r.err += ulp_of(r.mag_d());
    return r;
  }
  friend Cplx operator-(const Cplx& a) { return Cplx(-a.re, -a.im, a.err); }
  friend Cplx operator*(const Cplx& a, const Cplx& b) {
    Cplx r(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re,
           a.mag_d() * b.err + b.mag_d() * a.err + a.err * b.err);
    r.err += ulp_of(r.mag_d());
    return r;
  }
  friend Cplx operator/(const Cplx& a, const Cplx& b) {
    Real n = b.re * b.re + b.im * b.im;
    Cplx r((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n, 0.0);
    double bn = b.mag_d();
    if (bn > 0.0) r.err = (a.err + r.mag_d() * b.err) / bn;
    r.err += ulp_of(r.mag_d());
    return r;
  }
  Cplx& operator+=(const Cplx& o) { *this = *this + o; return *this; }
  Cplx& operator-=(const Cplx& o) { *this = *this - o; return *this; }
  Cplx& operator*=(const Cplx& o) { *this = *this * o; return *this; }

  friend Cplx operator*(const Cplx& a, const Real& s) { Cplx r(a.re * s, a.im * s, a.err * std::abs(s.to_double())); r.err += ulp_of(r.mag_d()); return r; }
  friend Cplx operator*(const Real& s, const Cplx& a) { return a * s; }
  friend Cplx operator/(const Cplx& a, const Real& s) { Cplx r(a.re / s, a.im / s, 0.0); double m = std::abs(s.to_double()); if (m > 0) r.err = a.err / m; r.err += ulp_of(r.mag_d()); return r; }
  friend Cplx operator*(const Cplx& a, long s) { return a * Real(s); }
  friend Cplx operator*(long s, const Cplx& a) { return a * Real(s); }
  friend Cplx operator/(const Cplx& a, long s) { return a / Real(s); }

  std::string str(int digits = 0) const {
    std::string s = re.str(digits);
    if (!im.is_zero()) s += (im.sign() >= 0 ? " + " : " - ") + rsm::abs(im).str(digits) + "i";
    return s;
  }
};

// exp of a complex argument.
inline Cplx cexp(const Cplx& z) {
  Real m = exp(z.re);
  Cplx r(m * cos(z.im), m * sin(z.im), z.err * std::exp(z.re.to_double()));
  r.err += Cplx::ulp_of(r.mag_d());
  return r;
}

// Principal log of a positive real raised into the complex domain is not
// needed; this is log of a general nonzero complex value.
inline Cplx clog(const Cplx& z) {
  Cplx r(log(z.abs()), atan2(z.im, z.re), 0.0);
  double m = z.mag_d();
  if (m > 0) r.err = z.err / m;
  r.err += Cplx::ulp_of(r.mag_d() + 1.0);
  return r;
}

// x^s for positive real x and complex exponent s.
inline Cplx cpow(const Real& x, const Cplx& s) {
  if (s.im.is_zero()) {
    Cplx r(pow(x, s.re), Real(0L), 0.0);
    r.err = Cplx::ulp_of(r.mag_d());
    return r;
  }
  return cexp(s * Cplx(log(x)));
}

// x^s for positive integer x.
inline Cplx cpow(long x, const Cplx& s) { return cpow(Real(x), s); }

// i^k with exact quarter turns.
inline Cplx ipow(long k) { return Cplx::unit(Turn::make(k, 4)); }

}  // namespace rsm
