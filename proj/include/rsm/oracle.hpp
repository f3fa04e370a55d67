#pragma once
// Numerical cross-check of the exact moment evaluator via the Petersson
// formula: the coefficient-pairing expectation expands as a diagonal term plus
// Kloosterman/Bessel sums
//
//   Delta_{mn} = 2 pi i^{-k} sum_{c = 0 mod N} S_chi(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c),
//
// and the twisted first moment becomes
//
//   L(chi eps, 2s) ( b_m / m^s + sum_{n >= 1} b_n Delta_{mn} / n^s ),
//
// absolutely convergent for Re(s) > 5/4.  Truncating both the c-sum and the
// n-sum gives an independent numerical value for the moment together with
// explicit truncation accounting.  The truncated evaluator is the oracle used
// to validate the exact engine away from the central point.

#include "rsm/complexv.hpp"
#include "rsm/chars.hpp"
#include "rsm/engine.hpp"

namespace rsm {

// Truncation accounting for the oracle.  Two figures are reported:
//
//  * tail_estimate — an honest estimate of the truncation error: a scaled
//    Cauchy difference of the partial n-sums (safety factor 4) plus the
//    explicit Weil/Bessel accounting of all mass excluded *inside* the
//    summation ranges (small-argument Bessel skip region, c > c_max tail) and
//    a floating-point round-off allowance.  On every validation point it
//    covers the measured |oracle - exact| gap.
//
//  * rigorous_bound — an explicit-constant absolute-value bound on the entire
//    discarded mass, instantiating |S_chi(m,n;c)| <= (m,n,c) tau(c) sqrt(c)
//    (the Weil bound) and |J_{k-1}(x)| <= min(1, C_k x^{k-1}, 1.5 x^{-1/2}).
//    The part beyond the coefficient horizon assumes |b_n| <= B d(n) where B
//    is measured on the available coefficients (B = 1 for normalized
//    eigenforms satisfying the Ramanujan bound).  The absolute-value envelope
//    of the n-tail is summable only for Re(s) > 2; below that the bound is
//    reported as +infinity.  It is typically far larger than tail_estimate
//    because it ignores all oscillation.
struct TruncationBound {
    long c_max = 0;
    long n_max = 0;
    double tail_estimate = 0.0;
    double rigorous_bound = 0.0;
    // Constants the bounds are instantiated with.
    double weil_constant = 1.0;          // multiplier on (m,n,c) tau(c) sqrt(c)
    double bessel_power_constant = 0.0;  // C_k = 1/((k-1)! 2^{k-1}) for x^{k-1}
    double bessel_decay_constant = 1.5;  // constant for the x^{-1/2} regime
};

// A truncated Petersson off-diagonal term with a bound on the c > c_max tail.
struct PeterssonDelta {
    Cplx value;
    double tail_bound = 0.0;
};

// The oracle value with its truncation accounting.
struct OracleResult {
    Cplx value;
    TruncationBound bound;
};

// Delta_{mn} truncated at c <= c_max, evaluated in working precision (Gauss
// sums over units, high-precision Bessel).  Intended for small scales and for
// validating the fast evaluator; cost grows like sum_{c} phi(c).
// Requires k >= 4.  tail_bound covers the discarded c > c_max terms via the
// Weil bound and the small-argument Bessel regime.
PeterssonDelta petersson_delta(long k, long N, const DirichletCharacter& chi,
                               long m, long n, long c_max);

// Truncated Petersson evaluation of the moment at s = twice_s / 2.
//
// Preconditions: twice_s >= 3 (the double sum converges absolutely only for
// Re(s) > 5/4), k >= 4, chi defined mod N, and the coefficient horizon of g
// must reach n_max (InsufficientData otherwise).
//
// The c-sum parallelizes over blocks of admissible c with a deterministic
// ordered reduction, so results are independent of the worker count and
// bit-identical to moment_oracle_serial.
OracleResult moment_oracle(const MomentProblem& p, long c_max, long n_max);

// Serial reference evaluator: same arithmetic, same summation order, no
// worker threads.  Kept for testing and benchmarking against the parallel
// path.
OracleResult moment_oracle_serial(const MomentProblem& p, long c_max,
                                  long n_max);

}  // namespace rsm
