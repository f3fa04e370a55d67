#pragma once
// Dirichlet L-functions: numeric values at arbitrary points via
// Euler-Maclaurin Hurwitz zeta sums, exact closed forms at s = 1 and at
// nonpositive integers (through generalized Bernoulli numbers), imprimitive
// reduction, and local Euler factor bookkeeping.

#include "rsm/chars.hpp"
#include "rsm/special.hpp"

#include <utility>

namespace rsm {

// L(chi, s).  The simple pole of the principal-character L-function at s = 1
// is tagged, not thrown.  Imprimitive characters are reduced to the primitive
// character inducing them, with the finitely many missing Euler factors
// restored.
PoleOr dirichlet_L(const DirichletCharacter& chi, const Cplx& s);
inline PoleOr dirichlet_L(const DirichletCharacter& chi, long s) {
  return dirichlet_L(chi, Cplx(s));
}

// Hurwitz zeta(s, a) for 0 < a <= 1, s != 1.
Cplx hurwitz_zeta(const Cplx& s, const Real& a);

// Generalized Bernoulli number B_{n, chi} = q^{n-1} sum_{a=1}^{q} chi(a) B_n(a/q).
Cplx generalized_bernoulli(const DirichletCharacter& chi, int n);

// Local Euler product L_N(chi, s) = prod_{p | N} (1 - chi(p) p^{-s})^{-1}.
// Throws if some local factor vanishes.
Cplx euler_local(const DirichletCharacter& chi, const Cplx& s, long N);

// Complementary value L^N(chi, s) = L(chi, s) prod_{p | N} (1 - chi(p) p^{-s}).
PoleOr euler_complement(const DirichletCharacter& chi, const Cplx& s, long N);

// Both sides of the odd-primitive-character identity
//   L(eps, 0) = (pi i)^{-1} tau(eps) L(conj(eps), 1),
// returned as (left, right) for cross-checking.
std::pair<Cplx, Cplx> functional_equation_L0(const DirichletCharacter& eps);

// Independent slow path for L(chi, 1), chi nonprincipal:
//   L(chi, 1) = -(1/q) sum_{a=1}^{q-1} chi(a) psi(a/q).
Cplx dirichlet_L1_digamma(const DirichletCharacter& chi);

}  // namespace rsm
