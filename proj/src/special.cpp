#include "rsm/special.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rsm {

namespace {

Real sinh_r(const Real& x) {
  Real out(0);
  mpfr_sinh(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

Real cosh_r(const Real& x) {
  Real out(0);
  mpfr_cosh(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

bool is_integer(const Real& x) { return mpfr_integer_p(x.raw()) != 0; }

// z an exact nonpositive integer (a Gamma pole)?
bool is_nonpositive_integer(const Cplx& z) {
  return z.im.is_zero() && is_integer(z.re) && !(z.re > Real(0));
}

// sin(pi z) for complex z, via sin(pi x)cosh(pi y) + i cos(pi x)sinh(pi y).
Cplx csin_pi(const Cplx& z) {
  Real pi = const_pi();
  Real px = pi * z.re;
  Real py = pi * z.im;
  return Cplx(sin(px) * cosh_r(py), cos(px) * sinh_r(py));
}

// log Gamma by the Stirling series; requires Re(z) large (caller shifts).
Cplx lngamma_stirling(const Cplx& z) {
  Real half_log_2pi = log(const_pi() * 2) / 2;
  Cplx acc = (z - Cplx(Real(1) / 2)) * clog(z) - z + Cplx(half_log_2pi);
  // sum_{j>=1} B_{2j} / (2j (2j-1) z^{2j-1})
  Cplx zinv = Cplx(Real(1)) / z;
  Cplx zinv2 = zinv * zinv;
  Cplx p = zinv;
  double eps = std::ldexp(1.0, -static_cast<int>(Real::default_precision()) - 8);
  double prev = 1e300;
  for (int j = 1; j <= 200; ++j) {
    const mpq_class& b = bernoulli(2 * j);
    Cplx term = p * Cplx(Real(b) / (2 * j * (2 * j - 1)));
    acc = acc + term;
    double tm = term.mag_d();
    if (tm < eps * std::max(1.0, acc.mag_d()) || tm > prev) break;
    prev = tm;
    p = p * zinv2;
  }
  return acc;
}

// Gamma for complex non-real z with Re(z) >= 1/2 (shift + Stirling).
Cplx cgamma_right(const Cplx& z) {
  double threshold = std::max(24.0, 0.40 * static_cast<double>(Real::default_precision()));
  Cplx w = z;
  Cplx shift_prod(Real(1));
  while (w.re.to_double() < threshold) {
    shift_prod = shift_prod * w;
    w = w + Cplx(Real(1));
  }
  return cexp(lngamma_stirling(w)) / shift_prod;
}

}  // namespace

const mpq_class& bernoulli(int n) {
  static std::vector<mpq_class> cache{mpq_class(1), mpq_class(-1, 2)};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  if (n < 0) throw std::domain_error("bernoulli: negative index");
  while (static_cast<int>(cache.size()) <= n) {
    int m = static_cast<int>(cache.size());
    if (m % 2 == 1) {
      cache.emplace_back(0);
      continue;
    }
    // sum_{j=0}^{m} C(m+1, j) B_j = 0  =>  B_m = -sum_{j<m} C(m+1,j) B_j / (m+1)
    mpq_class acc(0);
    for (int j = 0; j < m; ++j) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), m + 1, j);
      acc += mpq_class(c) * cache[j];
    }
    acc /= -(m + 1);
    acc.canonicalize();
    cache.push_back(acc);
  }
  return cache[n];
}

Cplx cgamma(const Cplx& z) {
  if (z.im.is_zero()) {
    if (is_integer(z.re) && !(z.re > Real(0)))
      throw std::domain_error("cgamma: pole at nonpositive integer");
    return Cplx(gamma(z.re));
  }
  if (z.re >= Real(1) / 2) return cgamma_right(z);
  // Reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z)).
  Cplx denom = csin_pi(z) * cgamma_right(Cplx(Real(1)) - z);
  return Cplx(const_pi()) / denom;
}

Cplx creciprocal_gamma(const Cplx& z) {
  if (is_nonpositive_integer(z)) return Cplx(Real(0));
  return Cplx(Real(1)) / cgamma(z);
}

bool critical_point_ok(long k, long l, long twice_s) {
  if (k <= l) return false;
  if (((twice_s - (k - l)) % 2) != 0) return false;  // parity of k +- l
  return (2 - (k - l) <= twice_s) && (twice_s <= k - l);
}

mpq_class hyp2f1_terminating_q(long k, long l, long twice_s, const mpq_class& x) {
  if (!critical_point_ok(k, l, twice_s))
    throw std::domain_error("hyp2f1_terminating: point outside the critical range");
  long r = (k - l - twice_s) / 2;
  mpq_class acc(1), term(1);
  for (long n = 1; n <= r; ++n) {
    long num1 = -r + 1 - twice_s + (n - 1);
    long num2 = -r + (n - 1);
    term *= mpq_class(num1) * mpq_class(num2);
    term /= mpq_class(l + n - 1) * mpq_class(n);
    term *= x;
    acc += term;
  }
  acc.canonicalize();
  return acc;
}

Cplx hyp2f1_terminating(long k, long l, long twice_s, const Cplx& x) {
  if (!critical_point_ok(k, l, twice_s))
    throw std::domain_error("hyp2f1_terminating: point outside the critical range");
  long r = (k - l - twice_s) / 2;
  Cplx acc(Real(1));
  Cplx term(Real(1));
  for (long n = 1; n <= r; ++n) {
    long num1 = -r + 1 - twice_s + (n - 1);
    long num2 = -r + (n - 1);
    term = term * Cplx(Real(num1) * Real(num2) / (Real(l + n - 1) * Real(n))) * x;
    acc = acc + term;
  }
  return acc;
}

Cplx hyp2f1_series(const Cplx& a, const Cplx& b, const Cplx& c, const Cplx& z) {
  double zm = z.mag_d();
  if (zm >= 1.0) throw std::domain_error("hyp2f1_series: |z| >= 1");
  Cplx acc(Real(1));
  Cplx term(Real(1));
  double eps = std::ldexp(1.0, -static_cast<int>(Real::default_precision()) - 8);
  long max_terms = 200000;
  double last = 0.0;
  for (long n = 0; n < max_terms; ++n) {
    Cplx an = a + Cplx(Real(n));
    Cplx bn = b + Cplx(Real(n));
    Cplx cn = c + Cplx(Real(n));
    term = term * an * bn * z / (cn * Cplx(Real(n + 1)));
    if (term.is_zero()) break;  // terminating parameters
    acc = acc + term;
    last = term.mag_d();
    if (last < eps * std::max(1.0, acc.mag_d()) && n > 2) break;
  }
  // Geometric-tail allowance on top of the tracked rounding error.
  acc.err += last / std::max(1e-6, 1.0 - zm) + 4 * Cplx::ulp_of(acc.mag_d());
  return acc;
}

Cplx kernel_I_critical(long k, long l, long twice_s, long ynum, long yden) {
  if (ynum <= 0 || yden <= 0) throw std::domain_error("kernel_I_critical: y must be positive");
  if (!critical_point_ok(k, l, twice_s))
    throw std::domain_error("kernel_I_critical: point outside the critical range");
  if (ynum == yden) {
    // Critical-case convention at y = 1: nonzero only at s = 1/2.
    if (twice_s == 1) return ipow(l - k + 1) * Cplx(Real(1) / 2);
    return Cplx(Real(0));
  }
  if (ynum < yden) {
    // (l-k)/2 + s is a nonpositive integer here, so 1/Gamma kills the branch.
    return Cplx(Real(0));
  }
  // y > 1 closed form: the Gauss series terminates with an exact rational
  // argument x = 1/(1-y) = yden/(yden - ynum).
  long r = (k - l - twice_s) / 2;
  (void)r;
  mpq_class x(yden, ynum - yden);
  x = -x;
  x.canonicalize();
  mpq_class f = hyp2f1_terminating_q(k, l, twice_s, x);
  Real y = Real(ynum) / Real(yden);
  Real ym1 = y - 1;
  Real pref = pow(y, Real(1 - k) / 2) * pow(ym1, Real(k - l - 2 + twice_s) / 2);
  Real gtop = gamma(Real(l + k - twice_s) / 2);
  Real gbot = gamma(Real(l)) * gamma(Real(k - l + twice_s) / 2);
  Real val = pref * gtop / gbot * Real(f);
  Cplx out(val);
  out.err += 8 * Cplx::ulp_of(out.mag_d());
  return out;
}

PoleOr kernel_I_generic(long k, long l, const Cplx& s, const Real& y) {
  if (!(y > Real(0))) throw std::domain_error("kernel_I_generic: y must be positive");
  if (!(s.re < Real(k + l) / 2))
    throw std::domain_error("kernel_I_generic: requires Re(s) < (k+l)/2");
  Cplx half_kl = Cplx(Real(k + l) / 2);
  Cplx half_kml = Cplx(Real(k - l) / 2);
  Cplx half_lmk = Cplx(Real(l - k) / 2);
  if (y == Real(1)) {
    Cplx t = s * Cplx(Real(2)) - Cplx(Real(1));  // 2s - 1
    if (is_nonpositive_integer(t)) return {Cplx(Real(0)), true};
    Cplx v = cgamma(half_kl - s) * cgamma(t) * creciprocal_gamma(half_kml + s) *
             creciprocal_gamma(half_lmk + s) * creciprocal_gamma(half_kl - Cplx(Real(1)) + s);
    return {v, false};
  }
  if (y > Real(1)) {
    // Pfaff-transformed branch: I = y^{s-(l+1)/2} Gamma((l+k)/2-s) /
    // (Gamma(l) Gamma((k-l)/2+s)) F((l-k)/2+1-s, (l+k)/2-s; l; 1/y).
    Cplx a = half_lmk + Cplx(Real(1)) - s;
    Cplx f = hyp2f1_series(a, half_kl - s, Cplx(Real(l)), Cplx(Real(1) / y));
    Cplx pref = cpow(y, s - Cplx(Real(l + 1) / 2));
    Cplx g = cgamma(half_kl - s) * creciprocal_gamma(half_kml + s) * Cplx(Real(1) / gamma(Real(l)));
    return {pref * g * f, false};
  }
  // 0 < y < 1: I = y^{(k-1)/2} (1-y)^{2s-1} Gamma((l+k)/2-s) /
  // (Gamma(k) Gamma((l-k)/2+s)) F((k-l)/2+s, (k+l)/2-1+s; k; y).
  Cplx rg = creciprocal_gamma(half_lmk + s);
  if (rg.is_zero()) return {Cplx(Real(0)), false};
  Cplx a = half_kml + s;
  Cplx f = hyp2f1_series(a, half_kl - Cplx(Real(1)) + s, Cplx(Real(k)), Cplx(y));
  Cplx pref = cpow(y, Cplx(Real(k - 1) / 2)) * cpow(Real(1) - y, s * Cplx(Real(2)) - Cplx(Real(1)));
  Cplx g = cgamma(half_kl - s) * rg * Cplx(Real(1) / gamma(Real(k)));
  return {pref * g * f, false};
}

Real bessel_j(long order, const Real& x) {
  Real out(0);
  mpfr_jn(out.raw(), order, x.raw(), MPFR_RNDN);
  return out;
}

double bessel_j_fast(int order, double x) {
  gsl_sf_result res;
  int status = gsl_sf_bessel_Jn_e(order, x, &res);
  if (status != GSL_SUCCESS && status != GSL_EUNDRFLW)
    throw std::runtime_error("bessel_j_fast: GSL evaluation failed");
  return res.val;
}

double bessel_bound_small_const(int order) {
  return std::exp(-std::lgamma(order + 1.0) - order * std::log(2.0));
}

double bessel_bound(int order, double x) {
  if (x <= 0) return order == 0 ? 1.0 : 0.0;
  double lb_small = order * std::log(x / 2.0) - std::lgamma(order + 1.0);
  double small = lb_small > 700 ? HUGE_VAL : std::exp(lb_small);
  double osc = kBesselHalfConst / std::sqrt(x);
  return std::min(1.0, std::min(small, osc));
}

}  // namespace rsm
