#pragma once
// Exact finite evaluation of twisted first moments of Rankin-Selberg
// L-values against a fixed cusp form g, together with the underlying
// kernel-coefficient series, specialized closed-form shortcuts, stability
// detectors, eigenvalue-ratio extraction, and root-number bookkeeping.
//
// Conventions.  The moment depends on a weight k, a level N with character
// chi mod N (chi(-1) = (-1)^k), a twist index m, an evaluation point s, and
// the form g of weight l < k, squarefree level D, nebentypus eps
// (eps(-1) = (-1)^l).  Critical points are the s with 2s an integer of the
// same parity as k + l lying in [1 - (k-l)/2, (k-l)/2]; there the moment is
// a finite sum evaluated exactly up to rounding.  Away from critical points
// the same object is an absolutely convergent series on the strip
// (3-k)/2 < Re(s) < (k-1)/2 and is evaluated by truncation with an explicit
// tail bound.

#include "rsm/arith.hpp"
#include "rsm/chars.hpp"
#include "rsm/forms.hpp"
#include "rsm/lvalues.hpp"
#include "rsm/special.hpp"

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace rsm {

// Data attached to one divisor delta of D: the coprime factorization
// eps = eps_d * eps_dp of the nebentypus, the primitive character xi of
// conductor q inducing chi * eps_dp mod lcm(N, delta'), the prime-to-q part
// M of lcm(N, delta'), the q-smooth/q-coprime split N = N1 * N2, and the
// product character psi = eps_d * xi twisting the divisor sums.
struct DeltaContext {
  long delta = 1;
  long deltap = 1;  // D / delta
  DirichletCharacter eps_d = DirichletCharacter::principal(1);
  DirichletCharacter eps_dp = DirichletCharacter::principal(1);
  DirichletCharacter xi = DirichletCharacter::principal(1);
  long q = 1;  // conductor of xi
  long M = 1;  // prime-to-q part of lcm(N, deltap)
  long N1 = 1, N2 = 1;
  DirichletCharacter psi = DirichletCharacter::principal(1);
};

DeltaContext delta_context(long N, const DirichletCharacter& chi, long D,
                           const DirichletCharacter& eps, long delta);

// One moment instance.  twice_s encodes a critical point s = twice_s / 2;
// operations taking an explicit complex s ignore it.  g is borrowed, not
// owned.  permissive_weight admits k in {2, 3} (outside the proven range of
// the finite formula) with a warning attached to results.
struct MomentProblem {
  long k = 4;
  long N = 1;
  DirichletCharacter chi = DirichletCharacter::principal(1);
  long m = 1;
  long twice_s = 1;
  const CuspForm* g = nullptr;
  bool permissive_weight = false;
};

// Best-effort closed-form identification: value ~ ratio * pi^pi_exp *
// sqrt(radicand).
struct SymbolicValue {
  mpq_class ratio;
  int pi_exp = 0;
  long radicand = 1;
};

struct DeltaDiagnostics {
  long delta = 1;
  Cplx T;                   // the outer factor T_s^delta
  Cplx inner;               // the accumulated inner n-sum
  long terms_used = 0;      // n-terms evaluated
  long terms_filtered = 0;  // n-terms skipped by the divisibility filter
};

struct MomentResult {
  Cplx value;
  Real error_bound{0L};
  std::optional<SymbolicValue> symbolic;
  std::vector<DeltaDiagnostics> diagnostics;
  std::vector<std::string> warnings;
};

// The outer factor
//   T_s^delta = (delta/4pi^2)^{1/2-s} i^l chi(delta) tau(xi)
//               (eps_d |.|^{-2s})(q) / eps_d(delta')
//               (eps_d xi |.|^{1-2s})(M),
// which vanishes exactly when chi(delta) = 0 (or eps_d xi vanishes on M).
Cplx T_term(const DeltaContext& ctx, const DirichletCharacter& chi, long l,
            long twice_s);
Cplx T_term(const DeltaContext& ctx, const DirichletCharacter& chi, long l,
            const Cplx& s);

// The twisted additive-divisor factor
//   S_s^delta(x) = (eps_d |.|^{1-2s})(x1) conj(xi)(x2)
//                  sum_{e | (M, x2)} mu(M/e) (e/M)
//                  sigma[eps_d xi |.|^{1-2s}](x2 / e)
// extended to x = 0 by (x1, x2) = (1, 0) and
// sigma[psi |.|^{1-2s}](0) = L(psi, 2s-1); the pole of that L-value (psi
// principal at s = 1) is returned as a tagged pole, never thrown.  Negative
// x is allowed: x2 carries the sign, characters act on residues and the
// divisor sum runs over |x2/e|.
PoleOr S_term(const DeltaContext& ctx, long twice_s, long x);
PoleOr S_term(const DeltaContext& ctx, const Cplx& s, long x);

// Exact critical-point evaluation of the finite moment formula
//   M_s = L(chi eps, 2s) b_m / m^s
//         + 2 pi i^{-k} sum_{delta | D} T_s^delta
//           sum_{n=1..m delta, N1 | (m delta - n)_1 q}
//             b_n^delta n^{s-1} I_s(m delta / n) S_s^delta(m delta - n),
// including the resolved 0 * pole substitution of the n = m delta term at
// s = 1 when both relevant characters are principal.
MomentResult finite_moment(const MomentProblem& p);

// Specialized closed forms, each evaluated on an independent code path for
// cross-validation against finite_moment.
//
// corollary_ex1: chi trivial mod a prime N, g a theta series of odd prime
// level D != N with quadratic nebentypus and b_D in {+1, -1}; s = 1/2.
// corollary_ex2: g of level 1, chi primitive mod N; s = 1/2.
// corollary_ex3: g an eigenform of prime level D with trivial nebentypus,
// chi primitive mod N, gcd(N, D) = 1; s = 1/2.
MomentResult corollary_ex1(const MomentProblem& p);
MomentResult corollary_ex2(const MomentProblem& p);
MomentResult corollary_ex3(const MomentProblem& p);

struct SeriesResult {
  Cplx value;
  Real tail_bound{0L};
  long terms_used = 0;
};

// Truncated evaluation of the kernel-coefficient series c_m(s) on the strip
// (3-k)/2 < Re(s) < (k-1)/2, minus the finitely many singular points
// (s in {1/2, 1} depending on principality, see the singular-set rule).
// At a critical point the series truncates exactly: terms with n > m delta
// vanish and the value agrees with finite_moment term by term.  Elsewhere
// the tail bound is C * n_max^{1-e} / (e-1) with decay exponent
// e = (k-1)/2 - max(0, 1 - 2 Re s) and C measured on the trailing half
// window of computed terms.
SeriesResult kernel_series_cm(const MomentProblem& p, const Cplx& s,
                              long n_max);

// Ratio of two finite-moment evaluations, equal (for one-dimensional spaces
// with nonvanishing base moment) to conj(lambda_m(f) / lambda_1(f)); scaled
// by m^{(k-1)/2} this predicts the conjugated raw Hecke eigenvalue.
Cplx eigenvalue_ratio(const MomentProblem& p, long m);

// RHS of the trivial-character simplification: for chi = 1, eps primitive
// mod D > 1, gcd(N, D) = 1, evaluates
//   [ b_m/m^s L(eps, 2s) + 2 pi i^{l-k} (eps|.|^{1-2s})(N) sum_{delta | D}
//     (delta/4pi^2)^{1/2-s} tau(eps_dp)/(delta')^{2s}
//     sum_{n <= m delta, N | (m delta - n)} b_n^delta n^{s-1}
//       I_s(m delta/n) (eps_d|.|^{1-2s})(x1) conj(eps_dp)(x2)
//       sigma[eps|.|^{1-2s}](x2 / N) ] / L^N(eps, 2s),
// the moment of the level-N kernel corrected by lower-level forms.
MomentResult real_simplification_rhs(const MomentProblem& p);

// Real dihedral moment at s = 1/2: k even, chi = 1, l odd, eps primitive
// quadratic, k > l, gcd(N, D) = 1, g an eigenform with b_1 = 1, under the
// hypothesis that lower-level forms have vanishing central L-value:
//   M = b_m/sqrt(m) L(eps,1) + eps(-N) conj(b_D^2) conj(b_m)/sqrt(m) L(eps,1)
//       + 2 pi i^{l-k} eps(N) sum_{delta | D} tau(eps_dp)/delta'
//         sum_{1 <= n < m delta, N | (m delta - n)} b_n^delta n^{-1/2}
//           I_{1/2}(m delta/n) eps_d(x1) eps_dp(x2) sigma[eps](x2/N).
MomentResult dihedral_moment(const MomentProblem& p);

// The stable range N > mD of the dihedral moment, where the divisor sums
// are empty and only the two leading terms survive; absent when N <= mD.
std::optional<MomentResult> stable_dihedral(const MomentProblem& p);

// Vertical stability at s = 1/2: when the level is deep enough in the
// relevant smooth direction the whole correction vanishes term by term.
//   (a) k > l, k - l odd, and N1/(N1, q) >= max(m delta, 2) for every
//       delta | D with gcd(delta, N) = 1: M = L(chi eps, 1) b_m / sqrt(m).
//   (b) k even, chi = 1, l odd, eps primitive, k > l, and
//       (N, D^inf)/(N, D) >= max(mD, 2): M = L^N(eps, 1) b_m / sqrt(m)
//       (in particular whenever p^{a+1} | N with p | D and p^a >= mD).
// Returns absent when no criterion applies.
std::optional<MomentResult> vertical_stability(const MomentProblem& p);

// Sign of the functional equation of L(f x g, s) for newforms f, g of
// coprime levels with f = conj(f), g = conj(g):
//   chi(-1) chi(D) eps(1) eta_f^2 eta_g^2   (k > l; eps(-1) instead of
//   chi(-1) when k <= l),
// where eta_f, eta_g are the Fricke pseudo-eigenvalues.
Cplx root_number(long k, long l, const DirichletCharacter& chi,
                 const DirichletCharacter& eps, const Cplx& eta_f,
                 const Cplx& eta_g);

// Archimedean factor gamma(s) = Gamma_C(s + |k-l|/2) Gamma_C(s + (k+l)/2 - 1)
// with Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
Cplx gamma_factor(long k, long l, const Cplx& s);

// Best-effort identification value ~ (p/q) pi^a sqrt(d) with a in {0, 1},
// denominator <= 10^6, d drawn from extra_radicands followed by the
// squarefree d <= 100; accepted only within 10x the error bound.  Never
// authoritative.
std::optional<SymbolicValue> recognize_symbolic(
    const Cplx& value, const Real& error_bound,
    const std::vector<long>& extra_radicands);

}  // namespace rsm
