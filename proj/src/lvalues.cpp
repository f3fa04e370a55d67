#include "rsm/lvalues.hpp"

#include "rsm/factor.hpp"

#include <cmath>
#include <stdexcept>

namespace rsm {

namespace {

bool exact_integer(const Cplx& s) { return s.im.is_zero() && mpfr_integer_p(s.re.raw()) != 0; }

bool is_exact_one(const Cplx& s) { return s.im.is_zero() && s.re == Real(1); }

// Bernoulli polynomial B_n(x) at rational x, exactly.
mpq_class bernoulli_poly(int n, const mpq_class& x) {
  mpq_class acc(0);
  mpq_class xp(1);  // x^j, j ascending; combine with binomials reversed
  // B_n(x) = sum_{k=0}^{n} C(n,k) B_{n-k} x^k
  for (int k = 0; k <= n; ++k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), n, k);
    acc += mpq_class(c) * bernoulli(n - k) * xp;
    xp *= x;
  }
  acc.canonicalize();
  return acc;
}

// Closed form at s = 1 for a nonprincipal primitive character.
Cplx primitive_L1(const DirichletCharacter& chi) {
  long q = chi.modulus();
  Cplx tau = gauss_sum(chi);
  DirichletCharacter bar = chi.conj();
  if (chi.parity() < 0) {
    // L(chi, 1) = (i pi tau(chi) / q) B_{1, conj(chi)},
    // B_{1, conj(chi)} = (1/q) sum a conj(chi)(a).
    Cplx b1;
    for (long a = 1; a < q; ++a) {
      auto t = bar.value(a);
      if (!t) continue;
      b1 += Cplx::unit(*t) * Real(a);
    }
    b1 = b1 / Real(q);
    return Cplx::i() * Cplx(const_pi()) * tau * b1 / Real(q);
  }
  // Even: L(chi, 1) = -(tau(chi)/q) sum conj(chi)(a) log sin(pi a / q).
  Cplx acc;
  Real pi = const_pi();
  for (long a = 1; a < q; ++a) {
    auto t = bar.value(a);
    if (!t) continue;
    acc += Cplx::unit(*t) * log(sin(pi * Real(a) / Real(q)));
  }
  return -(tau * acc) / Real(q);
}

}  // namespace

Cplx hurwitz_zeta(const Cplx& s, const Real& a) {
  if (is_exact_one(s)) throw std::domain_error("hurwitz_zeta: pole at s = 1");
  if (!(a > Real(0)) || a > Real(1)) throw std::domain_error("hurwitz_zeta: need 0 < a <= 1");
  long N = 80 + static_cast<long>(std::abs(s.im.to_double()));
  Cplx acc;
  for (long n = 0; n < N; ++n) acc += cpow(Real(n) + a, -s);
  Real w = Real(N) + a;
  acc += cpow(w, Cplx(Real(1)) - s) / (s - Cplx(Real(1)));
  acc += cpow(w, -s) / Real(2);
  // Euler-Maclaurin correction sum_{j>=1} B_{2j}/(2j)! (s)_{2j-1} w^{-s-2j+1}.
  Cplx poch = s;                         // (s)_{2j-1}
  Cplx wp = cpow(w, -s - Cplx(Real(1)));  // w^{-s-2j+1}
  Cplx winv2 = Cplx(Real(1) / (w * w));
  mpz_class fact = 2;  // (2j)!
  double eps = std::ldexp(1.0, -static_cast<int>(Real::default_precision()) - 8);
  double last = 0.0;
  for (int j = 1; j <= 120; ++j) {
    Cplx term = poch * wp * Cplx(Real(bernoulli(2 * j)) / Real(fact));
    acc += term;
    last = term.mag_d();
    if (last < eps * std::max(1.0, acc.mag_d())) break;
    poch = poch * (s + Cplx(Real(2 * j - 1))) * (s + Cplx(Real(2 * j)));
    wp = wp * winv2;
    fact *= (2 * j + 1);
    fact *= (2 * j + 2);
  }
  acc.err += last;
  return acc;
}

Cplx generalized_bernoulli(const DirichletCharacter& chi, int n) {
  if (n < 0) throw std::domain_error("generalized_bernoulli: negative index");
  long q = chi.modulus();
  Cplx acc;
  for (long a = 1; a <= q; ++a) {
    auto t = chi.value(a);
    if (!t) continue;
    mpq_class b = bernoulli_poly(n, mpq_class(a, q));
    if (b == 0) continue;
    acc += Cplx::unit(*t) * Real(b);
  }
  if (n >= 2) acc = acc * pow(Real(q), static_cast<long>(n - 1));
  else if (n <= 0) acc = acc / Real(q);  // q^{n-1} with n = 0
  // n == 1: factor q^0 = 1
  return acc;
}

PoleOr dirichlet_L(const DirichletCharacter& chi, const Cplx& s) {
  if (!chi.is_primitive()) {
    DirichletCharacter xi = chi.primitive_inducing();
    PoleOr base = dirichlet_L(xi, s);
    if (base.pole) return base;
    Cplx corr(Real(1));
    for (const auto& [p, e] : factorize(chi.modulus())) {
      (void)e;
      if (chi.conductor() % p == 0) continue;
      corr = corr * (Cplx(Real(1)) - xi.eval0(p) * cpow(p, -s));
    }
    return {base.v * corr, false};
  }
  long q = chi.modulus();
  if (q == 1) {  // Riemann zeta
    if (is_exact_one(s)) return {Cplx(), true};
    if (s.im.is_zero()) {
      Cplx v(zeta(s.re));
      v.err = 4 * Cplx::ulp_of(v.mag_d());
      return {v, false};
    }
    return {hurwitz_zeta(s, Real(1)), false};
  }
  if (exact_integer(s)) {
    long n = s.re.to_long();
    if (n == 1) return {primitive_L1(chi), false};
    if (n <= 0) {
      // L(chi, 1-m) = -B_{m,chi}/m with m = 1-n.
      long m = 1 - n;
      return {-(generalized_bernoulli(chi, static_cast<int>(m)) / Real(m)), false};
    }
  }
  // Generic point: L(chi, s) = q^{-s} sum_{a=1}^{q} chi(a) zeta(s, a/q).
  Cplx acc;
  for (long a = 1; a <= q; ++a) {
    auto t = chi.value(a);
    if (!t) continue;
    acc += Cplx::unit(*t) * hurwitz_zeta(s, Real(a) / Real(q));
  }
  return {acc * cpow(Real(q), -s), false};
}

Cplx euler_local(const DirichletCharacter& chi, const Cplx& s, long N) {
  Cplx acc(Real(1));
  for (const auto& [p, e] : factorize(N)) {
    (void)e;
    Cplx f = Cplx(Real(1)) - chi.eval0(p) * cpow(p, -s);
    if (f.mag_d() < 1e-30) throw std::domain_error("euler_local: vanishing local factor");
    acc = acc / f;
  }
  return acc;
}

PoleOr euler_complement(const DirichletCharacter& chi, const Cplx& s, long N) {
  PoleOr L = dirichlet_L(chi, s);
  if (L.pole) return L;
  Cplx acc = L.v;
  for (const auto& [p, e] : factorize(N)) {
    (void)e;
    acc = acc * (Cplx(Real(1)) - chi.eval0(p) * cpow(p, -s));
  }
  return {acc, false};
}

std::pair<Cplx, Cplx> functional_equation_L0(const DirichletCharacter& eps) {
  if (!eps.is_primitive() || eps.parity() >= 0 || eps.modulus() == 1)
    throw std::domain_error("functional_equation_L0: need an odd primitive character");
  Cplx lhs = dirichlet_L(eps, Cplx()).v;
  Cplx rhs = gauss_sum(eps) * dirichlet_L(eps.conj(), Cplx(Real(1))).v /
             (Cplx(const_pi()) * Cplx::i());
  return {lhs, rhs};
}

Cplx dirichlet_L1_digamma(const DirichletCharacter& chi) {
  if (chi.is_principal()) throw std::domain_error("dirichlet_L1_digamma: principal character");
  long q = chi.modulus();
  Cplx acc;
  for (long a = 1; a < q; ++a) {
    auto t = chi.value(a);
    if (!t) continue;
    acc += Cplx::unit(*t) * digamma(Real(a) / Real(q));
  }
  return -(acc / Real(q));
}

}  // namespace rsm
