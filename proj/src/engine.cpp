#include "rsm/engine.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rsm {

namespace {

// Shared validated view of a moment problem.
struct ProblemView {
  long k, N, m, l, D;
  const CuspForm* g;
  const DirichletCharacter* chi;
  const DirichletCharacter* eps;
};

ProblemView validate_problem(const MomentProblem& p,
                             std::vector<std::string>* warnings) {
  if (p.g == nullptr)
    throw std::invalid_argument("moment problem carries no cusp form");
  ProblemView v{p.k,  p.N, p.m, p.g->weight(), p.g->level(),
                p.g,  &p.chi, &p.g->nebentypus()};
  if (v.m < 1) throw std::domain_error("twist index m must be positive");
  if (v.N < 1 || p.chi.modulus() != v.N)
    throw std::invalid_argument("chi must be a character mod N");
  if (!is_squarefree(v.D))
    throw std::domain_error("the level of g must be squarefree");
  if (v.k < 4) {
    if (!p.permissive_weight || v.k < 2)
      throw std::domain_error(
          "weight k < 4 needs the permissive flag (and k >= 2)");
    if (warnings != nullptr)
      warnings->push_back("weight k = " + std::to_string(v.k) +
                          " lies below the proven range k >= 4; treat the "
                          "result as heuristic");
  }
  if (p.chi.parity() != (v.k % 2 == 0 ? 1 : -1))
    throw std::domain_error("chi(-1) must equal (-1)^k");
  if (v.eps->parity() != (v.l % 2 == 0 ? 1 : -1))
    throw std::domain_error("eps(-1) must equal (-1)^l");
  return v;
}

void require_critical(const ProblemView& v, long twice_s) {
  if (v.k <= v.l)
    throw std::domain_error("critical-point evaluation requires k > l");
  if (!critical_point_ok(v.k, v.l, twice_s))
    throw std::domain_error("2s must match the parity of k + l and lie in "
                            "[2 - (k - l), k - l]");
}

Real sqrt_l(long n) { return sqrt(Real(n)); }

// 2 pi i^{-k}, the outer constant of the moment formulas.
Cplx outer_constant(long k) {
  return ipow(-k) * (Real(2) * const_pi());
}

Real error_of(const Cplx& value) {
  return Real(value.err + 16 * Cplx::ulp_of(value.mag_d()));
}

// Continued-fraction rational reconstruction of x with denominator cap.
std::optional<mpq_class> rational_reconstruct(const Real& x0, long max_den,
                                              const Real& tol) {
  mpz_class pm1 = 0, qm1 = 1;  // convergent p_{-2}/q_{-2}
  mpz_class p0 = 1, q0 = 0;    // p_{-1}/q_{-1}: the first step produces a0/1
  Real x = x0;
  for (int it = 0; it < 64; ++it) {
    Real fl = floor(x);
    if (!(abs(fl) < Real(static_cast<long>(1) << 62))) return std::nullopt;
    mpz_class a(fl.str(40).c_str());  // floor(x) is an exact integer string
    mpz_class p = a * p0 + pm1, q = a * q0 + qm1;
    if (q > max_den) break;
    mpq_class cand(p, q);
    cand.canonicalize();
    if (abs(x0 - Real(cand)) <= tol) return cand;
    pm1 = p0; qm1 = q0; p0 = p; q0 = q;
    Real frac = x - fl;
    if (frac.is_zero()) break;
    x = Real(1) / frac;
  }
  return std::nullopt;
}

// The inner n-sum of the finite formula for one delta, at a critical point.
// mdelta = m * delta; the loop runs n = 1 .. n_cap (n_cap <= mdelta).  The
// resolved 0 * pole substitution replaces the kernel-times-divisor factor of
// the n = mdelta term when s = 1 falls on the double principality.
Cplx delta_inner_critical(const ProblemView& v, const DeltaContext& ctx,
                          long twice_s, long mdelta, long n_cap,
                          DeltaDiagnostics* diag) {
  Cplx inner;
  const Real n_exp = Real(twice_s - 2) / Real(2);  // exponent s - 1
  for (long n = 1; n <= n_cap; ++n) {
    const long x = mdelta - n;
    const auto [x1, x2] = split_relative(x, ctx.q);
    (void)x2;
    if ((x1 * ctx.q) % ctx.N1 != 0) {
      ++diag->terms_filtered;
      continue;
    }
    Cplx term;
    if (twice_s == 2 && n == mdelta && ctx.q == 1 &&
        ctx.eps_d.is_principal()) {
      // The kernel vanishes at y = 1 while the divisor factor's L-value
      // poles; the resolved limit replaces their product by the constant
      // (-1)^r phi(a) / (2 a (r+1) ((k+l)/2 - 1)) with r = (k-l)/2 - 1 and
      // a = delta * lcm(N, delta').
      const long r = (v.k - v.l) / 2 - 1;
      const long a = ctx.delta * std::lcm(v.N, ctx.deltap);
      mpq_class c(euler_phi(a),
                  2 * a * (r + 1) * ((v.k + v.l) / 2 - 1));
      c.canonicalize();
      if (r % 2 != 0) c = -c;
      term = v.g->b_cusp(ctx.delta, n) * Cplx(Real(c));
    } else {
      PoleOr S = S_term(ctx, twice_s, x);
      if (S.pole)
        throw std::domain_error(
            "unresolved pole in the additive-divisor factor");
      Cplx I = kernel_I_critical(v.k, v.l, twice_s, mdelta, n);
      term = v.g->b_cusp(ctx.delta, n) * pow(Real(n), n_exp) * I * S.v;
    }
    ++diag->terms_used;
    inner += term;
  }
  return inner;
}

void attach_symbolic(MomentResult* res, long D) {
  res->symbolic = recognize_symbolic(res->value, res->error_bound, {1, D});
}

}  // namespace

DeltaContext delta_context(long N, const DirichletCharacter& chi, long D,
                           const DirichletCharacter& eps, long delta) {
  if (N < 1 || D < 1 || delta < 1 || D % delta != 0)
    throw std::invalid_argument("delta_context: delta must divide D");
  if (chi.modulus() != N || eps.modulus() != D)
    throw std::invalid_argument("delta_context: character moduli mismatch");
  DeltaContext ctx;
  ctx.delta = delta;
  ctx.deltap = D / delta;
  auto parts = eps.factor(delta, ctx.deltap);
  ctx.eps_d = parts.first;
  ctx.eps_dp = parts.second;
  ctx.xi = product(chi, ctx.eps_dp).primitive_inducing();
  ctx.q = ctx.xi.modulus();
  ctx.M = prime_to_q_part(std::lcm(N, ctx.deltap), ctx.q);
  auto split = split_relative(N, ctx.q);
  ctx.N1 = split.first;
  ctx.N2 = split.second;
  ctx.psi = product(ctx.eps_d, ctx.xi);
  return ctx;
}

Cplx T_term(const DeltaContext& ctx, const DirichletCharacter& chi, long l,
            long twice_s) {
  Cplx chi_delta = chi.eval0(ctx.delta);
  if (chi_delta.is_zero()) return Cplx();
  Cplx psi_M = ctx.psi.eval0(ctx.M);
  if (psi_M.is_zero()) return Cplx();
  Cplx u = ipow(l) * chi_delta * gauss_sum(ctx.xi);
  Cplx eps_d_q = ctx.eps_d.eval0(ctx.q);
  if (eps_d_q.is_zero()) return Cplx();
  u *= eps_d_q;
  u = u / ctx.eps_d.eval0(ctx.deltap);  // a unit: gcd(delta, delta') = 1
  u *= psi_M;
  Real pi = const_pi();
  Real mag = pow(Real(ctx.delta) / (Real(4) * pi * pi),
                 Real(1 - twice_s) / Real(2));
  mag = mag * pow(Real(ctx.q), -twice_s);
  mag = mag * pow(Real(ctx.M), 1 - twice_s);
  return u * mag;
}

Cplx T_term(const DeltaContext& ctx, const DirichletCharacter& chi, long l,
            const Cplx& s) {
  Cplx chi_delta = chi.eval0(ctx.delta);
  if (chi_delta.is_zero()) return Cplx();
  Cplx psi_M = ctx.psi.eval0(ctx.M);
  if (psi_M.is_zero()) return Cplx();
  Cplx u = ipow(l) * chi_delta * gauss_sum(ctx.xi);
  Cplx eps_d_q = ctx.eps_d.eval0(ctx.q);
  if (eps_d_q.is_zero()) return Cplx();
  u *= eps_d_q;
  u = u / ctx.eps_d.eval0(ctx.deltap);
  u *= psi_M;
  Real pi = const_pi();
  Cplx two_s = s * 2L;
  Cplx half_minus_s = Cplx(Real(1) / Real(2), Real(0L)) - s;
  Cplx mag = cpow(Real(ctx.delta) / (Real(4) * pi * pi), half_minus_s);
  mag *= cpow(ctx.q, -two_s);
  mag *= cpow(ctx.M, Cplx(1L) - two_s);
  return u * mag;
}

PoleOr S_term(const DeltaContext& ctx, long twice_s, long x) {
  if (x == 0) {
    if (ctx.q != 1) return {Cplx(), false};  // conj(xi)(0) = 0 for q > 1
    PoleOr L = dirichlet_L(ctx.psi, twice_s - 1);
    if (L.pole) return {Cplx(), true};
    return {L.v * (Real(euler_phi(ctx.M)) / Real(ctx.M)), false};
  }
  const auto [x1, x2] = split_relative(x, ctx.q);
  Cplx xibar_x2 = ctx.xi.conj().eval0(x2);
  if (xibar_x2.is_zero()) return {Cplx(), false};
  const Cplx t(1 - twice_s);
  Cplx acc;
  const long x2a = x2 < 0 ? -x2 : x2;
  for (long e : divisors(std::gcd(ctx.M, x2a))) {
    int mu = mobius(ctx.M / e);
    if (mu == 0) continue;
    PoleOr sig = sigma_twisted(ctx.psi, t, x2 / e);  // x2/e != 0: finite sum
    acc += sig.v * (Real(mu * e) / Real(ctx.M));
  }
  Cplx head = ctx.eps_d.eval0(x1) * pow(Real(x1), 1 - twice_s);
  return {head * xibar_x2 * acc, false};
}

PoleOr S_term(const DeltaContext& ctx, const Cplx& s, long x) {
  const Cplx t = Cplx(1L) - s * 2L;
  if (x == 0) {
    if (ctx.q != 1) return {Cplx(), false};
    PoleOr L = dirichlet_L(ctx.psi, -t);
    if (L.pole) return {Cplx(), true};
    return {L.v * (Real(euler_phi(ctx.M)) / Real(ctx.M)), false};
  }
  const auto [x1, x2] = split_relative(x, ctx.q);
  Cplx xibar_x2 = ctx.xi.conj().eval0(x2);
  if (xibar_x2.is_zero()) return {Cplx(), false};
  Cplx acc;
  const long x2a = x2 < 0 ? -x2 : x2;
  for (long e : divisors(std::gcd(ctx.M, x2a))) {
    int mu = mobius(ctx.M / e);
    if (mu == 0) continue;
    PoleOr sig = sigma_twisted(ctx.psi, t, x2 / e);
    acc += sig.v * (Real(mu * e) / Real(ctx.M));
  }
  Cplx head = ctx.eps_d.eval0(x1) * cpow(x1, t);
  return {head * xibar_x2 * acc, false};
}

MomentResult finite_moment(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_critical(v, p.twice_s);
  const long twice_s = p.twice_s;

  PoleOr lead = dirichlet_L(product(*v.chi, *v.eps), twice_s);
  if (lead.pole)
    throw std::domain_error(
        "the leading L-value has a pole at this point; the moment is "
        "singular");
  Cplx value = lead.v * v.g->b(v.m) * pow(Real(v.m), -Real(twice_s) / Real(2));

  const Cplx pref = outer_constant(v.k);
  for (long delta : divisors(v.D)) {
    DeltaContext ctx = delta_context(v.N, *v.chi, v.D, *v.eps, delta);
    DeltaDiagnostics diag;
    diag.delta = delta;
    diag.T = T_term(ctx, *v.chi, v.l, twice_s);
    if (!diag.T.is_zero()) {
      const long mdelta = v.m * delta;
      if (v.g->cusp_horizon(delta) < mdelta)
        throw InsufficientData(
            "coefficient horizon of g at cusp delta = " +
            std::to_string(delta) + " is below m * delta = " +
            std::to_string(mdelta));
      diag.inner =
          delta_inner_critical(v, ctx, twice_s, mdelta, mdelta, &diag);
      value += pref * diag.T * diag.inner;
    }
    res.diagnostics.push_back(diag);
  }
  res.value = value;
  res.error_bound = error_of(value);
  attach_symbolic(&res, v.D);
  return res;
}

MomentResult corollary_ex1(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_critical(v, p.twice_s);
  if (p.twice_s != 1)
    throw std::domain_error("this shortcut is stated at s = 1/2");
  if (!v.chi->is_principal())
    throw std::domain_error("shortcut requires trivial chi");
  {
    const auto& f = factorize(v.N);
    if (f.size() != 1 || f[0].second != 1)
      throw std::domain_error("shortcut requires prime N");
  }
  {
    const auto& f = factorize(v.D);
    if (f.size() != 1 || f[0].second != 1 || v.D == v.N)
      throw std::domain_error("shortcut requires prime D distinct from N");
  }
  const DirichletCharacter& eps = *v.eps;
  if (!eps.is_primitive() || !product(eps, eps).is_principal() ||
      eps.is_principal())
    throw std::domain_error("shortcut requires primitive quadratic eps");
  const CuspForm& g = *v.g;
  if (g.horizon() < v.m * v.D)
    throw InsufficientData("coefficient horizon below m * D");
  Cplx bD = g.b(v.D);
  if (std::abs(bD.mag_d() - 1.0) > 1e-9 || std::abs(bD.im.to_double()) > 1e-9)
    throw std::domain_error("shortcut requires b_D in {+1, -1}");
  // Precondition of the two-term split: tau(eps) conj(b_D) is purely
  // imaginary (automatic for odd quadratic eps and real unit b_D).
  Cplx tau = gauss_sum(eps);
  if (std::abs((tau * bD.conj()).re.to_double()) > 1e-9 * tau.mag_d())
    throw std::domain_error("tau(eps) conj(b_D) is not purely imaginary");

  PoleOr L1 = dirichlet_L(eps, 1L);
  Cplx eps_N = eps.eval0(v.N);
  Cplx lead = (Cplx(1L) - eps_N / Real(v.N)) * L1.v * g.b(v.m) / sqrt_l(v.m);
  Cplx second = eps_N * tau * tau * (bD * bD).conj() / Real(v.D) *
                (Real(1) - Real(1) / Real(v.N)) *
                dirichlet_L(eps.conj(), 1L).v * g.b(v.m).conj() / sqrt_l(v.m);

  DirichletCharacter eps_bar = eps.conj();
  auto sigma0 = [](const DirichletCharacter& c, long y) {
    return sigma_twisted(c, Cplx(0L), y).v;
  };
  Cplx S1;
  for (long n = 1; n < v.m; ++n) {
    long x = v.m - n;
    Cplx bracket = -sigma0(eps_bar, x) / Real(v.N);
    if (x % v.N == 0) bracket += eps_bar.eval0(v.N) * sigma0(eps_bar, x / v.N);
    S1 += g.b(n) / sqrt_l(n) * kernel_I_critical(v.k, v.l, 1, v.m, n) *
          bracket;
  }
  Cplx SD;
  for (long n = 1; n < v.m * v.D; ++n) {
    long x = v.m * v.D - n;
    Cplx bracket = -sigma0(eps, x) / Real(v.N);
    if (x % v.N == 0) bracket += sigma0(eps, x / v.N);
    SD += g.b(n).conj() / sqrt_l(n) *
          kernel_I_critical(v.k, v.l, 1, v.m * v.D, n) * bracket;
  }
  SD = -(sqrt_l(v.D) * bD) * SD;

  Cplx tail = ipow(v.l - v.k) * (Real(2) * const_pi()) *
              gauss_sum(eps_bar) * eps_N / Real(v.D) * (S1 + SD);
  res.value = lead + second + tail;
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

MomentResult corollary_ex2(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_critical(v, p.twice_s);
  if (p.twice_s != 1)
    throw std::domain_error("this shortcut is stated at s = 1/2");
  if (v.D != 1) throw std::domain_error("shortcut requires g of level 1");
  if (!v.chi->is_primitive() || v.chi->is_principal())
    throw std::domain_error("shortcut requires primitive nontrivial chi");
  if (v.g->horizon() < v.m)
    throw InsufficientData("coefficient horizon below m");

  Cplx value = dirichlet_L(*v.chi, 1L).v * v.g->b(v.m) / sqrt_l(v.m);
  Cplx pref = ipow(v.l - v.k) * (Real(2) * const_pi()) * gauss_sum(*v.chi) /
              Real(v.N);
  DirichletCharacter chibar = v.chi->conj();
  Cplx sum;
  for (long n = 1; n < v.m; ++n) {
    sum += v.g->b(n) / sqrt_l(n) * kernel_I_critical(v.k, v.l, 1, v.m, n) *
           sigma_twisted(chibar, Cplx(0L), v.m - n).v;
  }
  res.value = value + pref * sum;
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

MomentResult corollary_ex3(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_critical(v, p.twice_s);
  if (p.twice_s != 1)
    throw std::domain_error("this shortcut is stated at s = 1/2");
  {
    const auto& f = factorize(v.D);
    if (f.size() != 1 || f[0].second != 1)
      throw std::domain_error("shortcut requires prime D");
  }
  if (!v.eps->is_principal())
    throw std::domain_error("shortcut requires trivial nebentypus");
  if (!v.g->is_eigenform())
    throw std::domain_error("shortcut requires an eigenform g");
  if (!v.chi->is_primitive() || v.chi->is_principal())
    throw std::domain_error("shortcut requires primitive nontrivial chi");
  if (v.N % v.D == 0)
    throw std::domain_error("shortcut requires gcd(N, D) = 1");
  if (v.g->horizon() < v.m * v.D * v.D)
    throw InsufficientData("coefficient horizon below m * D^2");

  const DirichletCharacter& chi = *v.chi;
  DirichletCharacter chibar = chi.conj();
  Cplx chi_D = chi.eval0(v.D);
  Cplx lead =
      (Cplx(1L) - chi_D / Real(v.D)) * dirichlet_L(chi, 1L).v * v.g->b(v.m) /
      sqrt_l(v.m);
  Cplx C = ipow(v.l - v.k) * (Real(2) * const_pi()) * gauss_sum(chi) * chi_D /
           Real(v.N);

  auto sigma0 = [](const DirichletCharacter& c, long y) {
    return sigma_twisted(c, Cplx(0L), y).v;
  };
  Cplx A;
  for (long n = 1; n < v.m; ++n) {
    long x = v.m - n;
    auto [x1, x2] = split_relative(x, v.N);
    (void)x1;
    Cplx chib_x2 = chibar.eval0(x2);
    if (chib_x2.is_zero()) continue;
    Cplx bracket = -sigma0(chi, x2) / Real(v.D);
    if (x2 % v.D == 0) bracket += sigma0(chi, x2 / v.D);
    A += v.g->b(n) / sqrt_l(n) * kernel_I_critical(v.k, v.l, 1, v.m, n) *
         chib_x2 * bracket;
  }
  Cplx B;
  const Real sqrtD = sqrt_l(v.D);
  for (long n = 1; n < v.m * v.D; ++n) {
    long x = v.m * v.D - n;
    auto [x1, x2] = split_relative(x, v.N);
    (void)x1;
    Cplx chib_x2 = chibar.eval0(x2);
    if (chib_x2.is_zero()) continue;
    // Divisor sum restricted to divisors coprime to D.
    Cplx sig;
    long x2a = x2 < 0 ? -x2 : x2;
    for (long d : divisors(x2a))
      if (d % v.D != 0) sig += chi.eval0(d);
    B += -(sqrtD * v.g->b(n * v.D)) / sqrt_l(n) *
         kernel_I_critical(v.k, v.l, 1, v.m * v.D, n) * chib_x2 * sig;
  }
  res.value = lead + C * (A + B);
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

SeriesResult kernel_series_cm(const MomentProblem& p, const Cplx& s,
                              long n_max) {
  SeriesResult out;
  ProblemView v = validate_problem(p, nullptr);
  if (n_max < 1) throw std::invalid_argument("n_max must be positive");
  Real two_re = s.re * 2L;
  if (!(two_re > Real(3 - v.k) && two_re < Real(v.k - 1)))
    throw std::domain_error("s lies outside the convergence strip "
                            "(3-k)/2 < Re(s) < (k-1)/2");

  // Reject the singular points: s in {1/2, 1} when chi eps_dp and eps_d are
  // both principal (1 only arising for k = l).
  for (long delta : divisors(v.D)) {
    DeltaContext ctx = delta_context(v.N, *v.chi, v.D, *v.eps, delta);
    bool both_principal = ctx.q == 1 && ctx.eps_d.is_principal();
    if (!both_principal || (v.k - v.l) % 2 != 0) continue;
    bool at_half = s.im.is_zero() && s.re == Real(1) / Real(2);
    bool at_one = s.im.is_zero() && s.re == Real(1);
    if ((v.k == v.l && (at_half || at_one)) || (v.k != v.l && at_half))
      throw std::domain_error("s lies in the singular set of the series");
  }

  // Critical points route through the exact finite evaluation term by term.
  long twice_s_int = 0;
  bool critical = false;
  if (s.im.is_zero() && floor(two_re) == two_re &&
      abs(two_re) < Real(1000000L)) {
    twice_s_int = (two_re.to_long());
    critical = v.k > v.l && critical_point_ok(v.k, v.l, twice_s_int);
  }

  PoleOr lead = dirichlet_L(product(*v.chi, *v.eps),
                            critical ? Cplx(twice_s_int) : s * 2L);
  if (lead.pole)
    throw std::domain_error("the leading L-value has a pole at this point");
  Cplx value;
  if (critical) {
    value = lead.v * v.g->b(v.m) *
            pow(Real(v.m), -Real(twice_s_int) / Real(2));
  } else {
    value = lead.v * v.g->b(v.m) * cpow(v.m, -s);
  }

  const Cplx pref = outer_constant(v.k);
  Real tail(0L);
  // Decay exponent of the series terms; the tail bound is only finite for
  // e > 1 (always the case on the strip when k >= 4 ... e = (k-1)/2 at
  // Re(s) >= 1/2, degrading toward the left edge).
  Real e_exp = Real(v.k - 1) / Real(2);
  Real shift = Real(1L) - two_re;
  if (shift > Real(0L)) e_exp = e_exp - shift;

  for (long delta : divisors(v.D)) {
    DeltaContext ctx = delta_context(v.N, *v.chi, v.D, *v.eps, delta);
    DeltaDiagnostics diag;
    diag.delta = delta;
    Cplx T = critical ? T_term(ctx, *v.chi, v.l, twice_s_int)
                      : T_term(ctx, *v.chi, v.l, s);
    if (T.is_zero()) continue;
    const long mdelta = v.m * delta;
    const long n_cap = critical ? std::min(n_max, mdelta) : n_max;
    if (v.g->cusp_horizon(delta) < n_cap)
      throw InsufficientData("coefficient horizon of g at cusp delta = " +
                             std::to_string(delta) + " is below " +
                             std::to_string(n_cap));
    Cplx inner;
    Real window_C(0L);
    if (critical) {
      inner = delta_inner_critical(v, ctx, twice_s_int, mdelta, n_cap, &diag);
      if (n_max < mdelta) {
        // Remaining terms bounded through the same window heuristic as the
        // generic path.
        for (long n = std::max(1L, n_cap / 2); n <= n_cap; ++n) {
          long x = mdelta - n;
          auto sp = split_relative(x, ctx.q);
          if ((sp.first * ctx.q) % ctx.N1 != 0) continue;
          PoleOr S = S_term(ctx, twice_s_int, x);
          if (S.pole) continue;
          Cplx I = kernel_I_critical(v.k, v.l, twice_s_int, mdelta, n);
          Cplx term = v.g->b_cusp(delta, n) *
                      pow(Real(n), Real(twice_s_int - 2) / Real(2)) * I * S.v;
          window_C = max(window_C, term.abs() * pow(Real(n), e_exp));
        }
      }
    } else {
      const Cplx n_exp = s - Cplx(1L);  // exponent s - 1
      for (long n = 1; n <= n_cap; ++n) {
        const long x = mdelta - n;
        const auto [x1, x2] = split_relative(x, ctx.q);
        (void)x2;
        if ((x1 * ctx.q) % ctx.N1 != 0) {
          ++diag.terms_filtered;
          continue;
        }
        PoleOr S = S_term(ctx, s, x);
        if (S.pole)
          throw std::domain_error(
              "divisor-factor pole off the critical set; s is too close to "
              "a singular point");
        Cplx term;
        if (!S.v.is_zero()) {
          PoleOr I = kernel_I_generic(v.k, v.l, s, Real(mdelta) / Real(n));
          if (I.pole)
            throw std::domain_error(
                "kernel pole at y = 1 for this s (2s - 1 a nonpositive "
                "integer)");
          term = v.g->b_cusp(delta, n) * cpow(n, n_exp) * I.v * S.v;
        }
        ++diag.terms_used;
        inner += term;
        if (n > n_cap / 2)
          window_C = max(window_C, term.abs() * pow(Real(n), e_exp));
      }
    }
    out.terms_used += diag.terms_used;
    value += pref * T * inner;
    // Tail of sum over n > n_cap of C n^{-e}: C n_cap^{1-e}/(e-1).
    if (!(critical && n_max >= mdelta) && !window_C.is_zero()) {
      if (e_exp > Real(1L)) {
        Real t_abs = T.abs() * Real(2) * const_pi();
        tail = tail + t_abs * window_C * pow(Real(n_cap), Real(1L) - e_exp) /
                          (e_exp - Real(1L));
      } else {
        tail = tail + Real("1e300");
      }
    }
  }
  out.value = value;
  out.tail_bound = tail;
  return out;
}

Cplx eigenvalue_ratio(const MomentProblem& p, long m) {
  MomentProblem pm = p;
  pm.m = m;
  MomentResult num = finite_moment(pm);
  pm.m = 1;
  MomentResult den = finite_moment(pm);
  Real mag = den.value.abs();
  if (!(mag > den.error_bound * Real(4)))
    throw std::domain_error("the m = 1 moment vanishes; ratio undefined");
  return num.value / den.value;
}

MomentResult real_simplification_rhs(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_critical(v, p.twice_s);
  if (!v.chi->is_principal())
    throw std::domain_error("trivial-character simplification needs chi = 1");
  if (v.D == 1 || !v.eps->is_primitive())
    throw std::domain_error(
        "trivial-character simplification needs primitive eps mod D > 1");
  if (std::gcd(v.N, v.D) != 1)
    throw std::domain_error("requires gcd(N, D) = 1");
  const long ts = p.twice_s;

  Cplx L_eps = dirichlet_L(*v.eps, ts).v;
  Cplx value = v.g->b(v.m) * pow(Real(v.m), -Real(ts) / Real(2)) * L_eps;
  Cplx pref = ipow(v.l - v.k) * (Real(2) * const_pi()) * v.eps->eval0(v.N) *
              pow(Real(v.N), 1 - ts);
  Real pi = const_pi();

  for (long delta : divisors(v.D)) {
    const long deltap = v.D / delta;
    auto parts = v.eps->factor(delta, deltap);
    const DirichletCharacter& eps_d = parts.first;
    const DirichletCharacter eps_dp_bar = parts.second.conj();
    Cplx Afac = gauss_sum(parts.second) *
                (pow(Real(delta) / (Real(4) * pi * pi),
                     Real(1 - ts) / Real(2)) *
                 pow(Real(deltap), -ts));
    const long mdelta = v.m * delta;
    if (v.g->cusp_horizon(delta) < mdelta)
      throw InsufficientData("coefficient horizon of g at cusp delta = " +
                             std::to_string(delta));
    Cplx inner;
    for (long n = 1; n <= mdelta; ++n) {
      const long x = mdelta - n;
      if (x % v.N != 0) continue;
      const auto [x1, x2] = split_relative(x, deltap);
      Cplx f2 = eps_dp_bar.eval0(x2);
      if (f2.is_zero()) continue;
      Cplx f1 = eps_d.eval0(x1) * pow(Real(x1), 1 - ts);
      PoleOr sig = sigma_twisted(*v.eps, Cplx(1 - ts), x2 / v.N);
      if (sig.pole)
        throw std::domain_error("divisor-factor pole in the simplification");
      Cplx I = kernel_I_critical(v.k, v.l, ts, mdelta, n);
      inner += v.g->b_cusp(delta, n) *
               pow(Real(n), Real(ts - 2) / Real(2)) * I * f1 * f2 * sig.v;
    }
    value += pref * Afac * inner;
  }

  PoleOr LN = euler_complement(*v.eps, Cplx(ts), v.N);
  res.value = value / LN.v;
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

namespace {

// Shared hypothesis gate of the dihedral evaluators.
void require_dihedral(const ProblemView& v, long twice_s) {
  if (twice_s != 1)
    throw std::domain_error("dihedral formulas are stated at s = 1/2");
  if (v.k % 2 != 0 || v.l % 2 != 1 || v.k <= v.l)
    throw std::domain_error("dihedral formulas need even k > odd l");
  if (!v.chi->is_principal())
    throw std::domain_error("dihedral formulas need chi = 1");
  if (v.D == 1 || !v.eps->is_primitive() ||
      !product(*v.eps, *v.eps).is_principal())
    throw std::domain_error(
        "dihedral formulas need primitive quadratic eps mod D > 1");
  if (std::gcd(v.N, v.D) != 1)
    throw std::domain_error("dihedral formulas need gcd(N, D) = 1");
  if (!v.g->is_eigenform() ||
      (v.g->b1() - Cplx(1L)).mag_d() > 1e-12)
    throw std::domain_error("dihedral formulas need an eigenform with b1 = 1");
}

}  // namespace

MomentResult dihedral_moment(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_dihedral(v, p.twice_s);
  res.warnings.push_back(
      "assumes vanishing central L-values for forms of strictly lower level");
  const CuspForm& g = *v.g;
  if (g.horizon() < std::max(v.m, v.D))
    throw InsufficientData("coefficient horizon below max(m, D)");

  Cplx L1 = dirichlet_L(*v.eps, 1L).v;
  Cplx bm = g.b(v.m), bD = g.b(v.D);
  Cplx value = bm / sqrt_l(v.m) * L1 +
               v.eps->eval0(-v.N) * (bD * bD).conj() * bm.conj() /
                   sqrt_l(v.m) * L1;

  Cplx pref =
      ipow(v.l - v.k) * (Real(2) * const_pi()) * v.eps->eval0(v.N);
  for (long delta : divisors(v.D)) {
    const long deltap = v.D / delta;
    auto parts = v.eps->factor(delta, deltap);
    const long mdelta = v.m * delta;
    if (mdelta > 1 && g.cusp_horizon(delta) < mdelta - 1)
      throw InsufficientData("coefficient horizon of g at cusp delta = " +
                             std::to_string(delta));
    Cplx inner;
    for (long n = 1; n < mdelta; ++n) {
      const long x = mdelta - n;
      if (x % v.N != 0) continue;
      const auto [x1, x2] = split_relative(x, deltap);
      Cplx f2 = parts.second.eval0(x2);
      if (f2.is_zero()) continue;
      inner += g.b_cusp(delta, n) / sqrt_l(n) *
               kernel_I_critical(v.k, v.l, 1, mdelta, n) *
               parts.first.eval0(x1) * f2 *
               sigma_twisted(*v.eps, Cplx(0L), x2 / v.N).v;
    }
    value += pref * (gauss_sum(parts.second) / Real(deltap)) * inner;
  }
  res.value = value;
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

std::optional<MomentResult> stable_dihedral(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  require_dihedral(v, p.twice_s);
  if (v.N <= v.m * v.D) return std::nullopt;
  res.warnings.push_back(
      "assumes vanishing central L-values for forms of strictly lower level");
  if (v.g->horizon() < std::max(v.m, v.D))
    throw InsufficientData("coefficient horizon below max(m, D)");
  Cplx L1 = dirichlet_L(*v.eps, 1L).v;
  Cplx bm = v.g->b(v.m), bD = v.g->b(v.D);
  res.value = (bm + v.eps->eval0(-v.N) * (bD * bD).conj() * bm.conj()) /
              sqrt_l(v.m) * L1;
  res.error_bound = error_of(res.value);
  attach_symbolic(&res, v.D);
  return res;
}

std::optional<MomentResult> vertical_stability(const MomentProblem& p) {
  MomentResult res;
  ProblemView v = validate_problem(p, &res.warnings);
  if (p.twice_s != 1) return std::nullopt;
  if (v.k <= v.l) return std::nullopt;

  // Criterion (a): k - l odd and every surviving delta-context has
  // N1/(N1, q) >= max(m delta, 2).
  if ((v.k - v.l) % 2 == 1) {
    bool holds = true;
    for (long delta : divisors(v.D)) {
      if (std::gcd(delta, v.N) != 1) continue;  // killed by chi(delta) = 0
      DeltaContext ctx = delta_context(v.N, *v.chi, v.D, *v.eps, delta);
      long bar = std::max(v.m * delta, 2L);
      if (ctx.N1 / std::gcd(ctx.N1, ctx.q) < bar) {
        holds = false;
        break;
      }
    }
    if (holds) {
      if (v.g->horizon() < v.m)
        throw InsufficientData("coefficient horizon below m");
      PoleOr L = dirichlet_L(product(*v.chi, *v.eps), 1L);
      if (!L.pole) {
        res.value = L.v * v.g->b(v.m) / sqrt_l(v.m);
        res.error_bound = error_of(res.value);
        res.warnings.push_back("vertical stability: smooth-part criterion");
        attach_symbolic(&res, v.D);
        return res;
      }
    }
  }

  // Criterion (b): trivial chi with primitive eps, deep D-smooth level.
  if (v.k % 2 == 0 && v.l % 2 == 1 && v.chi->is_principal() &&
      v.eps->is_primitive() && v.D > 1) {
    long smooth = smooth_part(v.N, v.D);
    long g0 = std::gcd(v.N, v.D);
    bool holds = smooth / g0 >= std::max(v.m * v.D, 2L);
    if (!holds) {
      // Prime-power sufficient condition: p | D, p^{a+1} | N, p^a >= mD.
      for (const auto& [prime, e] : factorize(v.D)) {
        (void)e;
        long pa = 1, n_left = v.N;
        while (n_left % prime == 0) {
          n_left /= prime;
          pa *= prime;
        }
        if (pa >= prime && pa / prime >= v.m * v.D) {
          holds = true;
          break;
        }
      }
    }
    if (holds) {
      if (v.g->horizon() < v.m)
        throw InsufficientData("coefficient horizon below m");
      PoleOr LN = euler_complement(*v.eps, Cplx(1L), v.N);
      if (!LN.pole) {
        res.value = LN.v * v.g->b(v.m) / sqrt_l(v.m);
        res.error_bound = error_of(res.value);
        res.warnings.push_back(
            "vertical stability: trivial-nebentypus criterion");
        attach_symbolic(&res, v.D);
        return res;
      }
    }
  }
  return std::nullopt;
}

Cplx root_number(long k, long l, const DirichletCharacter& chi,
                 const DirichletCharacter& eps, const Cplx& eta_f,
                 const Cplx& eta_g) {
  const long D = eps.modulus();
  Cplx sign = (k > l) ? chi.eval0(-1) : eps.eval0(-1);
  return sign * chi.eval0(D) * eps.eval0(1) * eta_f * eta_f * eta_g * eta_g;
}

Cplx gamma_factor(long k, long l, const Cplx& s) {
  auto gamma_C = [](const Cplx& z) {
    return cgamma(z) * cpow(Real(2) * const_pi(), -z) * 2L;
  };
  const long ad = k > l ? k - l : l - k;
  Cplx a = s + Cplx(Real(ad) / Real(2), Real(0L));
  Cplx b = s + Cplx(Real(k + l) / Real(2) - Real(1), Real(0L));
  return gamma_C(a) * gamma_C(b);
}

std::optional<SymbolicValue> recognize_symbolic(
    const Cplx& value, const Real& error_bound,
    const std::vector<long>& extra_radicands) {
  Real tol = error_bound * Real(10);
  Real floor_tol = (abs(value.re) + Real(1)) * Real("1e-30");
  tol = max(tol, floor_tol);
  if (!(abs(value.im) <= tol)) return std::nullopt;
  const Real& x = value.re;
  if (abs(x) <= tol) return SymbolicValue{mpq_class(0), 0, 1};

  std::vector<long> rads;
  for (long d : extra_radicands)
    if (d >= 1 && is_squarefree(d)) rads.push_back(d);
  for (long d = 1; d <= 100; ++d)
    if (is_squarefree(d)) rads.push_back(d);

  const Real pi = const_pi();
  for (int a : {1, 0}) {
    for (long d : rads) {
      Real scale = a == 1 ? pi * sqrt(Real(d)) : sqrt(Real(d));
      Real y = x / scale;
      auto r = rational_reconstruct(y, 1000000L, tol / scale);
      if (r) return SymbolicValue{*r, a, d};
    }
  }
  return std::nullopt;
}

}  // namespace rsm
