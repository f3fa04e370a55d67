#pragma once
// Special functions for the moment formulas: exact Bernoulli numbers, the
// Gamma function on the complex plane, terminating and generic Gauss
// hypergeometric series, the hypergeometric kernel I_s in all branches, and
// J-Bessel evaluation (high-precision reference plus a fast double-precision
// path for the trace-formula sums).

#include "rsm/complexv.hpp"

#include <gmpxx.h>

namespace rsm {

// A value that may instead be a tagged pole marker.
struct PoleOr {
  Cplx v;
  bool pole = false;
};

// Exact Bernoulli number B_n (B_1 = -1/2 convention), cached.
const mpq_class& bernoulli(int n);

// Gamma for real argument away from poles.
inline Real gamma_real(const Real& z) { return gamma(z); }

// Gamma of a complex argument (argument-shifted Stirling series).
Cplx cgamma(const Cplx& z);
// 1/Gamma, entire; exactly 0 at nonpositive integer arguments.
Cplx creciprocal_gamma(const Cplx& z);

// Admissibility of a critical point: 2s an integer of the parity of k +- l
// with 1 - (k-l)/2 <= s <= (k-l)/2 (k > l).  twice_s = 2s.
bool critical_point_ok(long k, long l, long twice_s);

// The terminating hypergeometric sum
//   F(x) = sum_{n=0}^{r} (-r+1-2s)_n (-r)_n / ((l)_n (1)_n) x^n,
// r = (k-l)/2 - s, with coefficients computed in exact rational arithmetic.
mpq_class hyp2f1_terminating_q(long k, long l, long twice_s, const mpq_class& x);
Cplx hyp2f1_terminating(long k, long l, long twice_s, const Cplx& x);

// Generic Gauss series sum_{n} (a)_n (b)_n / ((c)_n n!) z^n for |z| < 1.
Cplx hyp2f1_series(const Cplx& a, const Cplx& b, const Cplx& c, const Cplx& z);

// Kernel I_s(y) at a critical point; y = ynum/yden > 0 exactly.  At y = 1 the
// critical-case convention applies: 0 for s != 1/2 and i^{l-k+1}/2 at s = 1/2.
Cplx kernel_I_critical(long k, long l, long twice_s, long ynum, long yden);

// Kernel I_s(y) for general s with Re(s) < (k+l)/2.  At y = 1 the value has a
// simple pole at 2s - 1 a nonpositive integer (signalled, not resolved);
// callers wanting critical-case semantics use kernel_I_critical.
PoleOr kernel_I_generic(long k, long l, const Cplx& s, const Real& y);

// J-Bessel of integer order: correctly rounded reference (MPFR).
Real bessel_j(long order, const Real& x);
// Fast double-precision J-Bessel for the oracle hot path (GSL).
double bessel_j_fast(int order, double x);
// Published magnitude-bound constants: |J_{k-1}(x)| <= min(C_small x^{k-1},
// C_HALF x^{-1/2}) on the oracle operating range (order <= 40, x <= 1e3).
double bessel_bound_small_const(int order);        // 1/((order)! 2^order) for J_order
inline constexpr double kBesselHalfConst = 1.5;    // validated over the operating range
double bessel_bound(int order, double x);

}  // namespace rsm
