#include "rsm/arith.hpp"

#include "rsm/factor.hpp"

#include <numeric>
#include <stdexcept>

namespace rsm {

namespace {

long inverse_mod(long a, long m) {
  long r0 = m, r1 = ((a % m) + m) % m, t0 = 0, t1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    long r2 = r0 - q * r1;
    long t2 = t0 - q * t1;
    r0 = r1; r1 = r2; t0 = t1; t1 = t2;
  }
  if (r0 != 1) throw std::domain_error("inverse_mod: arguments not coprime");
  return ((t0 % m) + m) % m;
}

}  // namespace

PoleOr sigma_twisted(const DirichletCharacter& xi, const Cplx& t, long x) {
  if (x == 0) return dirichlet_L(xi, -t);
  long ax = x < 0 ? -x : x;
  Cplx acc;
  for (long d : divisors(ax)) {
    auto v = xi.value(d);
    if (!v) continue;
    acc += Cplx::unit(*v) * cpow(d, t);
  }
  return {acc, false};
}

Cplx kloosterman(const DirichletCharacter& chi, long m, long n, long c) {
  if (c <= 0) throw std::invalid_argument("kloosterman: c must be positive");
  if (c % chi.modulus() != 0)
    throw std::invalid_argument("kloosterman: character modulus must divide c");
  Cplx acc;
  for (long d = 1; d <= c; ++d) {
    if (std::gcd(d, c) != 1) continue;
    auto v = chi.value(d);
    if (!v) continue;
    long dinv = inverse_mod(d, c);
    long num = ((m % c) * d + (n % c) * dinv) % c;
    acc += Cplx::unit(v->plus(Turn::make(num, c)));
  }
  return acc;
}

Cplx gauss_ramanujan(const DirichletCharacter& xi, long c, long x) {
  long q = xi.modulus();
  if (c <= 0) throw std::invalid_argument("gauss_ramanujan: c must be positive");
  if (c % q != 0) throw std::invalid_argument("gauss_ramanujan: need q | c");
  if (!xi.is_primitive()) throw std::invalid_argument("gauss_ramanujan: character must be primitive");
  auto [c1, c2] = split_relative(c, q);
  auto [x1, x2] = split_relative(x, q);
  if (x1 * q != c1) return Cplx();
  Cplx xibar_x2 = xi.conj().eval0(x2);
  if (xibar_x2.is_zero()) return Cplx();
  long g = x2 == 0 ? c2 : std::gcd(c2, x2 < 0 ? -x2 : x2);
  long ram = 0;
  for (long d : divisors(g)) ram += d * mobius(c2 / d);
  if (ram == 0) return Cplx();
  return Real(x1 * ram) * (xibar_x2 * xi.eval0(c2) * gauss_sum(xi));
}

Cplx gauss_ramanujan_brute(const DirichletCharacter& xi, long c, long x) {
  Cplx acc;
  for (long a = 1; a <= c; ++a) {
    if (std::gcd(a, c) != 1) continue;
    auto v = xi.value(a);
    if (!v) continue;
    long num = ((x % c) * a) % c;
    acc += Cplx::unit(v->plus(Turn::make(num, c)));
  }
  return acc;
}

}  // namespace rsm
