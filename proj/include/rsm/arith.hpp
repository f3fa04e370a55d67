#pragma once
// Character-twisted arithmetic sums: twisted divisor sums (including their
// L-value regularization at argument 0), twisted Kloosterman sums in exact
// root-of-unity arithmetic, and the closed-form Gauss-Ramanujan sum.

#include "rsm/lvalues.hpp"

namespace rsm {

// sigma[xi |.|^t](x) = sum_{d | |x|} xi(d) d^t for x != 0.  At x = 0 the
// regularized value L(xi, -t) is returned, with the principal-character pole
// at -t = 1 tagged rather than thrown.
PoleOr sigma_twisted(const DirichletCharacter& xi, const Cplx& t, long x);

// Twisted Kloosterman sum
//   S_chi(m, n, c) = sum_{d mod c, (d,c)=1} chi(d) e_c(m d + n dbar),
// evaluated by exact root-of-unity accumulation.  Requires chi's modulus | c.
Cplx kloosterman(const DirichletCharacter& chi, long m, long n, long c);

// Gauss-Ramanujan sum sum_{a in (Z/cZ)^*} xi(a) e_c(x a) for xi primitive
// mod q with q | c, via the closed form: writing c = c1 c2 and x = x1 x2
// relative to q, the sum is x1 conj(xi)(x2) xi(c2) tau(xi)
// sum_{d | (c2, x2)} d mu(c2/d) when x1 q = c1, and zero otherwise.
Cplx gauss_ramanujan(const DirichletCharacter& xi, long c, long x);

// Literal unit-group sum, for cross-checking gauss_ramanujan.
Cplx gauss_ramanujan_brute(const DirichletCharacter& xi, long c, long x);

}  // namespace rsm
