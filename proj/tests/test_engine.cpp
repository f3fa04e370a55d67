#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rsm/engine.hpp"
#include "rsm/factor.hpp"

using namespace rsm;

namespace {

double cdist(const Cplx& a, const Cplx& b) {
    return (a - b).abs().to_double();
}

double rdist(const Cplx& a, const Cplx& b) {
    double scale = std::max(1.0, b.abs().to_double());
    return cdist(a, b) / scale;
}

const CuspForm& delta500() {
    static CuspForm f = delta_form(500);
    return f;
}

const CuspForm& g1_form() {
    static CuspForm f =
        load_coefficients(std::string(RSM_DATA_DIR) + "/forms/g1_s7_7.coef");
    return f;
}

const CuspForm& theta3() {
    static CuspForm f = theta_imaginary_quadratic(3, {}, 400);
    return f;
}

const CuspForm& theta7() {
    static CuspForm f = theta_imaginary_quadratic(7, {}, 240);
    return f;
}

const CuspForm& theta11() {
    static CuspForm f = theta_imaginary_quadratic(11, {}, 240);
    return f;
}

const CuspForm& theta23() {
    static CuspForm f = theta_imaginary_quadratic(
        23,
        {{{1, 1, 6}, Turn::make(0, 3)},
         {{2, 1, 3}, Turn::make(1, 3)},
         {{2, -1, 3}, Turn::make(2, 3)}},
        300);
    return f;
}

const CuspForm& e11_form() {
    static CuspForm f = elliptic_ap_form({0, -1, 1, -10, -20}, 11, 1500);
    return f;
}

const CuspForm& e17_form() {
    static CuspForm f = elliptic_ap_form({1, -1, 1, -1, -14}, 17, 900);
    return f;
}

Cplx gauss_brute(const DirichletCharacter& xi) {
    long q = xi.modulus();
    Cplx s;
    for (long a = 0; a < q; ++a)
        s += xi.eval0(a) * Cplx::unit(Turn::make(a, q));
    return s;
}

// Independent expansion of the twisted additive-divisor factor from its
// definition, re-deriving the splits and divisor loops from scratch.
Cplx S_brute(const DeltaContext& ctx, long twice_s, long x) {
    if (x == 0) {
        if (ctx.q != 1) return Cplx();
        Real frac = Real(euler_phi(ctx.M)) / Real(ctx.M);
        return dirichlet_L(ctx.psi, Cplx{Real(twice_s - 1), Real(0)}).v * frac;
    }
    long ax = std::abs(x);
    long x1 = smooth_part(ax, ctx.q);
    long x2 = x / x1;
    Cplx head = ctx.eps_d.eval0(x1) * pow(Real(x1), 1 - twice_s) *
                ctx.xi.conj().eval0(x2);
    Cplx acc;
    long gx = std::gcd(ctx.M, std::abs(x2));
    for (long e = 1; e <= gx; ++e) {
        if (gx % e != 0) continue;
        int mu = mobius(ctx.M / e);
        if (mu == 0) continue;
        Cplx sig;
        long y = std::abs(x2 / e);
        for (long d = 1; d <= y; ++d)
            if (y % d == 0) sig += ctx.psi.eval0(d) * pow(Real(d), 1 - twice_s);
        acc += sig * Real(mu) * (Real(e) / Real(ctx.M));
    }
    return head * acc;
}

}  // namespace

TEST_CASE("delta contexts carry the expected invariants") {
    // Level-1 form, primitive chi mod 5: the context collapses onto chi.
    DirichletCharacter chi5 =
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});
    DeltaContext c1 = delta_context(5, chi5, 1, DirichletCharacter::principal(1), 1);
    CHECK(c1.delta == 1);
    CHECK(c1.deltap == 1);
    CHECK(c1.q == 5);
    CHECK(c1.xi == chi5);
    CHECK(c1.M == 1);
    CHECK(c1.N1 == 5);
    CHECK(c1.N2 == 1);
    CHECK(c1.psi == chi5);

    // Principal chi mod 11, quadratic nebentypus mod 7, delta = D = 7.
    DirichletCharacter eps7 = DirichletCharacter::kronecker_character(-7);
    DeltaContext cD = delta_context(11, DirichletCharacter::principal(11), 7, eps7, 7);
    CHECK(cD.delta == 7);
    CHECK(cD.deltap == 1);
    CHECK(cD.eps_d == eps7);
    CHECK(cD.q == 1);
    CHECK(cD.M == 11);
    CHECK(cD.N1 == 1);
    CHECK(cD.N2 == 11);
    CHECK(cD.psi == eps7);

    // And its delta = 1 side: xi is induced by chi * eps mod lcm(11, 7).
    DeltaContext cO = delta_context(11, DirichletCharacter::principal(11), 7, eps7, 1);
    CHECK(cO.deltap == 7);
    CHECK(cO.eps_dp == eps7);
    CHECK(cO.xi == eps7);
    CHECK(cO.q == 7);
    CHECK(cO.M == 11);

    CHECK_THROWS_AS(delta_context(5, chi5, 7, eps7, 2), std::invalid_argument);
}

TEST_CASE("outer factor T: proof values at the central point") {
    // Level-1 case: T^1_{1/2} = i^l tau(chi)/N.
    DirichletCharacter chi5 =
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});
    DeltaContext c1 = delta_context(5, chi5, 1, DirichletCharacter::principal(1), 1);
    Cplx expect1 = ipow(12) * gauss_brute(chi5) * (Real(1) / Real(5));
    CHECK(cdist(T_term(c1, chi5, 12, 1L), expect1) < 1e-28);

    // Principal chi, delta = D: T^D_{1/2} = i^l eps(N).
    DirichletCharacter eps7 = DirichletCharacter::kronecker_character(-7);
    DirichletCharacter triv11 = DirichletCharacter::principal(11);
    DeltaContext cD = delta_context(11, triv11, 7, eps7, 7);
    Cplx expectD = ipow(1) * eps7.eval0(11);
    CHECK(cdist(T_term(cD, triv11, 1, 1L), expectD) < 1e-28);

    // The two overloads agree at every admissible critical point.
    for (long ts : {-3L, -1L, 1L, 3L}) {
        Cplx s{Real(ts) / Real(2), Real(0)};
        CHECK(cdist(T_term(c1, chi5, 12, ts), T_term(c1, chi5, 12, s)) < 1e-28);
        CHECK(cdist(T_term(cD, triv11, 1, ts), T_term(cD, triv11, 1, s)) < 1e-28);
    }

    // chi(delta) = 0 kills the factor exactly.
    DirichletCharacter triv21 = DirichletCharacter::principal(21);
    DeltaContext cZ = delta_context(21, triv21, 7, eps7, 7);
    CHECK(T_term(cZ, triv21, 1, 1L).is_zero());
}

TEST_CASE("divisor factor S: proof values and literal expansion") {
    DirichletCharacter chi5 =
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});
    DeltaContext c1 = delta_context(5, chi5, 1, DirichletCharacter::principal(1), 1);
    // q > 1 forces S(0) = 0.
    PoleOr s0 = S_term(c1, 1L, 0);
    CHECK(!s0.pole);
    CHECK(s0.v.is_zero());

    // q = 1: S(0) = (phi(M)/M) L(psi, 2s - 1).
    DirichletCharacter eps7 = DirichletCharacter::kronecker_character(-7);
    DirichletCharacter triv11 = DirichletCharacter::principal(11);
    DeltaContext cD = delta_context(11, triv11, 7, eps7, 7);
    PoleOr sD = S_term(cD, 1L, 0);
    REQUIRE(!sD.pole);
    Cplx expect0 = dirichlet_L(eps7, 0L).v * (Real(10) / Real(11));
    CHECK(cdist(sD.v, expect0) < 1e-26);

    // Literal expansion across contexts, arguments, and critical points.
    DirichletCharacter triv9 = DirichletCharacter::principal(9);
    DirichletCharacter eps3 = DirichletCharacter::kronecker_character(-3);
    std::vector<DeltaContext> ctxs = {
        c1, cD,
        delta_context(11, triv11, 7, eps7, 1),
        delta_context(9, triv9, 3, eps3, 1),
        delta_context(9, triv9, 3, eps3, 3),
        delta_context(5, chi5, 3, eps3, 3),
    };
    for (const DeltaContext& ctx : ctxs)
        for (long ts : {1L, 3L})
            for (long x : {-12L, -7L, -2L, -1L, 1L, 2L, 3L, 6L, 11L, 22L, 35L}) {
                PoleOr got = S_term(ctx, ts, x);
                REQUIRE(!got.pole);
                CHECK(cdist(got.v, S_brute(ctx, ts, x)) < 1e-25);
            }

    // x = 0 with psi principal at s = 1 is the tagged pole.
    DirichletCharacter triv5 = DirichletCharacter::principal(5);
    DeltaContext cP = delta_context(5, triv5, 1, DirichletCharacter::principal(1), 1);
    CHECK(S_term(cP, 2L, 0).pole);
    CHECK(!S_term(cP, 1L, 0).pole);

    // The long and complex-s overloads agree off the singular set.
    Cplx half{Real(1) / Real(2), Real(0)};
    for (long x : {0L, 1L, 5L, 12L})
        CHECK(cdist(S_term(cD, 1L, x).v, S_term(cD, half, x).v) < 1e-26);
}

TEST_CASE("golden moment: weight 8 level 3 against the order-7 CM form") {
    MomentProblem p{8, 3, DirichletCharacter::principal(3), 1, 1, &g1_form(), false};
    MomentResult r = finite_moment(p);
    Real expect = const_pi() * (Real(648) / Real(2401)) * sqrt(Real(7));
    CHECK(abs(r.value.re - expect).to_double() < 1e-25);
    CHECK(std::abs(r.value.im.to_double()) < 1e-25);
    CHECK(std::abs(r.value.re.to_double() - 2.2432709819153773026601667436) <
          1e-15);
    REQUIRE(r.symbolic.has_value());
    CHECK(r.symbolic->ratio == mpq_class(648, 2401));
    CHECK(r.symbolic->pi_exp == 1);
    CHECK(r.symbolic->radicand == 7);
    CHECK(r.warnings.empty());
}

TEST_CASE("golden moment: weight 5 level 7 against the conductor-11 eigenform") {
    MomentProblem p{5, 7, DirichletCharacter::kronecker_character(-7), 1, 1,
                    &e11_form(), false};
    MomentResult r = finite_moment(p);
    Real expect = const_pi() * (Real(6) / Real(121)) * sqrt(Real(7));
    CHECK(abs(r.value.re - expect).to_double() < 1e-25);
    CHECK(std::abs(r.value.im.to_double()) < 1e-25);
    REQUIRE(r.symbolic.has_value());
    CHECK(r.symbolic->ratio == mpq_class(6, 121));
    CHECK(r.symbolic->pi_exp == 1);
    CHECK(r.symbolic->radicand == 7);
}

TEST_CASE("eigenvalue ratios recover raw Hecke eigenvalues") {
    // Weight 8, level 3: the unique newform has a(2) = 6.
    MomentProblem p8{8, 3, DirichletCharacter::principal(3), 1, 1, &g1_form(),
                     false};
    Cplx raw2 = eigenvalue_ratio(p8, 2) * pow(sqrt(Real(2)), 7L);
    CHECK(std::abs(raw2.re.to_double() - 6.0) < 1e-20);
    CHECK(std::abs(raw2.im.to_double()) < 1e-20);

    // Weight 5, level 7 with the quadratic character: a(m) for small m.
    MomentProblem p5{5, 7, DirichletCharacter::kronecker_character(-7), 1, 1,
                     &e11_form(), false};
    long a_expect[] = {1, 1, 0, -15, 0, 0, 49, -31};
    for (long m = 1; m <= 8; ++m) {
        Cplx raw = eigenvalue_ratio(p5, m) * pow(sqrt(Real(m)), 4L);
        CHECK(std::abs(raw.re.to_double() - a_expect[m - 1]) < 1e-18);
        CHECK(std::abs(raw.im.to_double()) < 1e-18);
    }
}

TEST_CASE("eigenvalue ratios satisfy the Hecke composition rule") {
    MomentProblem p{5, 7, DirichletCharacter::kronecker_character(-7), 1, 1,
                    &e11_form(), false};
    DirichletCharacter chi = DirichletCharacter::kronecker_character(-7);
    auto r = [&](long m) { return eigenvalue_ratio(p, m); };
    // conj(lambda_m) conj(lambda_n) = sum_{d | (m,n)} conj(chi(d))
    //                                 conj(lambda_{mn/d^2}).
    std::vector<std::pair<long, long>> pairs = {{2, 2}, {2, 3}, {3, 3},
                                                {2, 4}, {3, 4}, {2, 5}};
    for (auto [m, n] : pairs) {
        Cplx lhs = r(m) * r(n);
        Cplx rhs;
        long g = std::gcd(m, n);
        for (long d = 1; d <= g; ++d) {
            if (g % d != 0) continue;
            rhs += chi.conj().eval0(d) * r(m * n / (d * d));
        }
        CHECK(cdist(lhs, rhs) < 1e-22);
    }
}

TEST_CASE("degenerate point s = 1 agrees with series extrapolation") {
    // Average the series at s = 1 +- h and extrapolate h -> 0; compare with
    // the exact finite evaluation, including its resolved 0 * pole term.
    for (long k : {14L, 16L}) {
        for (long m : {1L, 3L}) {
            MomentProblem p{k, 5, DirichletCharacter::principal(5), m, 2,
                            &delta500(), false};
            MomentResult fin = finite_moment(p);
            auto at = [&](double h) {
                Cplx sp{Real(std::to_string(1.0 + h)), Real(0)};
                Cplx sm{Real(std::to_string(1.0 - h)), Real(0)};
                Cplx a = kernel_series_cm(p, sp, 350).value;
                Cplx b = kernel_series_cm(p, sm, 350).value;
                return (a + b) * (Real(1) / Real(2));
            };
            Cplx coarse = at(1e-2), fine = at(1e-3);
            Cplx extrap = (fine * Real(100) - coarse) * (Real(1) / Real(99));
            CHECK(cdist(fin.value, extrap) < 1e-8);
        }
    }
}

TEST_CASE("kernel series truncates exactly at critical points") {
    DirichletCharacter chi5 =
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});
    for (long ts : {3L, 5L})
        for (long m : {1L, 2L}) {
            MomentProblem p{17, 5, chi5, m, ts, &delta500(), false};
            MomentResult fin = finite_moment(p);
            Cplx s{Real(ts) / Real(2), Real(0)};
            SeriesResult ser = kernel_series_cm(p, s, 64);
            CHECK(cdist(ser.value, fin.value) < 1e-30);
            CHECK(ser.tail_bound.to_double() < 1e-30);
        }
}

TEST_CASE("kernel series rejects points off its domain") {
    MomentProblem p{14, 5, DirichletCharacter::principal(5), 1, 2, &delta500(),
                    false};
    // Outside the convergence strip (3-k)/2 < Re s < (k-1)/2.
    CHECK_THROWS_AS(kernel_series_cm(p, Cplx(7L), 100), std::domain_error);
    CHECK_THROWS_AS(kernel_series_cm(p, Cplx(-6L), 100), std::domain_error);
    // s = 1/2 is singular here (principal characters, k - l even).
    Cplx half{Real(1) / Real(2), Real(0)};
    CHECK_THROWS_AS(kernel_series_cm(p, half, 100), std::domain_error);
    // Nearby points are fine.
    Cplx near{Real("0.6"), Real(0)};
    CHECK_NOTHROW(kernel_series_cm(p, near, 50));
    CHECK_THROWS_AS(kernel_series_cm(p, near, 0), std::invalid_argument);
}

TEST_CASE("level-1 closed form matches the general evaluator") {
    struct Cfg {
        long k, m;
        DirichletCharacter chi;
    };
    std::vector<Cfg> cfgs = {
        {13, 1, DirichletCharacter::kronecker_character(-4)},
        {13, 2, DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}})},
        {15, 1, DirichletCharacter::from_values(7, {{3, Turn::make(1, 6)}})},
        {15, 3, DirichletCharacter::kronecker_character(-11)},
        {17, 2, DirichletCharacter::from_values(11, {{2, Turn::make(1, 10)}})},
        {17, 5, DirichletCharacter::kronecker_character(-3)},
        {21, 4, DirichletCharacter::from_values(13, {{2, Turn::make(1, 12)}})},
        {13, 6, DirichletCharacter::from_values(9, {{2, Turn::make(1, 6)}})},
    };
    for (const Cfg& c : cfgs) {
        MomentProblem p{c.k, c.chi.modulus(), c.chi, c.m, 1, &delta500(), false};
        MomentResult fin = finite_moment(p);
        MomentResult cor = corollary_ex2(p);
        CHECK(rdist(cor.value, fin.value) < 1e-28);
    }
}

TEST_CASE("theta closed form matches the general evaluator") {
    struct Cfg {
        long k, N, m;
        const CuspForm* g;
    };
    std::vector<Cfg> cfgs = {
        {4, 5, 1, &theta3()},  {4, 5, 2, &theta3()},  {6, 13, 3, &theta3()},
        {4, 11, 1, &theta7()}, {6, 5, 2, &theta7()},  {8, 13, 1, &theta7()},
        {4, 5, 1, &theta11()}, {6, 13, 2, &theta11()},
        {4, 5, 1, &theta23()}, {6, 5, 2, &theta23()},
    };
    for (const Cfg& c : cfgs) {
        MomentProblem p{c.k, c.N, DirichletCharacter::principal(c.N), c.m, 1,
                        c.g, false};
        MomentResult fin = finite_moment(p);
        MomentResult cor = corollary_ex1(p);
        CHECK(rdist(cor.value, fin.value) < 1e-28);
    }
}

TEST_CASE("prime-level eigenform closed form matches the general evaluator") {
    struct Cfg {
        long k, m;
        DirichletCharacter chi;
        const CuspForm* g;
    };
    std::vector<Cfg> cfgs = {
        {5, 1, DirichletCharacter::kronecker_character(-7), &e11_form()},
        {5, 2, DirichletCharacter::kronecker_character(-4), &e11_form()},
        {5, 3, DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}}),
         &e11_form()},
        {7, 2, DirichletCharacter::kronecker_character(-3), &e11_form()},
        {5, 1, DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}}),
         &e17_form()},
        {7, 3, DirichletCharacter::kronecker_character(-7), &e17_form()},
    };
    for (const Cfg& c : cfgs) {
        MomentProblem p{c.k, c.chi.modulus(), c.chi, c.m, 1, c.g, false};
        MomentResult fin = finite_moment(p);
        MomentResult cor = corollary_ex3(p);
        CHECK(rdist(cor.value, fin.value) < 1e-28);
    }
}

TEST_CASE("trivial-character simplification reproduces the moment") {
    struct Cfg {
        long k, N, m;
        const CuspForm* g;
    };
    std::vector<Cfg> cfgs = {
        {4, 5, 1, &theta3()}, {4, 5, 2, &theta3()},  {6, 7, 1, &theta3()},
        {6, 5, 1, &theta7()}, {4, 13, 3, &theta7()}, {8, 5, 2, &theta11()},
    };
    for (const Cfg& c : cfgs) {
        MomentProblem p{c.k, c.N, DirichletCharacter::principal(c.N), c.m, 1,
                        c.g, false};
        MomentResult fin = finite_moment(p);
        MomentResult rsr = real_simplification_rhs(p);
        Cplx LN = euler_complement(c.g->nebentypus(), Cplx(1L), c.N).v;
        CHECK(rdist(rsr.value * LN, fin.value) < 1e-27);
    }
}

TEST_CASE("dihedral closed form, stable range, and a structural zero") {
    for (long N : {5L, 7L}) {
        for (long m : {1L, 2L}) {
            MomentProblem p{4, N, DirichletCharacter::principal(N), m, 1,
                            &theta3(), false};
            MomentResult fin = finite_moment(p);
            MomentResult dih = dihedral_moment(p);
            CHECK(cdist(dih.value, fin.value) < 1e-28);
            CHECK(!dih.warnings.empty());  // states its vanishing hypothesis

            auto st = stable_dihedral(p);
            if (N > m * 3) {
                REQUIRE(st.has_value());
                CHECK(cdist(st->value, fin.value) < 1e-28);
            } else {
                CHECK(!st.has_value());
            }
        }
    }

    // eps(-N) = -1 at N = 7 makes the two leading terms cancel: the whole
    // moment vanishes in the stable range.
    MomentProblem pz{4, 7, DirichletCharacter::principal(7), 1, 1, &theta3(),
                     false};
    MomentResult z = finite_moment(pz);
    CHECK(z.value.abs().to_double() < 1e-35);

    // Deeper dihedral pair: D = 7 at weight 6.
    MomentProblem p7{6, 5, DirichletCharacter::principal(5), 1, 1, &theta7(),
                     false};
    CHECK(cdist(dihedral_moment(p7).value, finite_moment(p7).value) < 1e-28);
    auto st7 = stable_dihedral(p7);
    CHECK(!st7.has_value());  // N = 5 <= mD = 7
}

TEST_CASE("vertical stability engages on deep levels") {
    // Golden configuration: the level is 9 = 3^2 with D = 3.
    MomentProblem p{4, 9, DirichletCharacter::principal(9), 1, 1, &theta3(),
                    false};
    auto vs = vertical_stability(p);
    REQUIRE(vs.has_value());
    MomentResult fin = finite_moment(p);
    CHECK(cdist(vs->value, fin.value) < 1e-28);
    Real expect = const_pi() / (Real(3) * sqrt(Real(3)));
    CHECK(std::abs(vs->value.re.to_double() - 0.6045997880780726168646927525) <
          1e-25);
    CHECK(abs(vs->value.re - expect).to_double() < 1e-28);

    // All correction terms are filtered or vanish identically.
    for (const DeltaDiagnostics& d : fin.diagnostics)
        CHECK((d.T.is_zero() || d.inner.is_zero()));

    // Deeper power: N = 27 sustains twists up to m = 9.
    for (long m : {1L, 2L, 3L}) {
        MomentProblem p27{6, 27, DirichletCharacter::principal(27), m, 1,
                          &theta3(), false};
        auto v27 = vertical_stability(p27);
        REQUIRE(v27.has_value());
        MomentResult f27 = finite_moment(p27);
        CHECK(cdist(v27->value, f27.value) < 1e-28);
        Cplx lead = dirichlet_L(product(DirichletCharacter::principal(27),
                                        theta3().nebentypus()),
                                1L)
                        .v *
                    theta3().b(m) / sqrt(Real(m));
        CHECK(cdist(v27->value, lead) < 1e-28);
    }

    // N = 49 with D = 7.
    MomentProblem p49{4, 49, DirichletCharacter::principal(49), 1, 1, &theta7(),
                      false};
    auto v49 = vertical_stability(p49);
    REQUIRE(v49.has_value());
    CHECK(cdist(v49->value, finite_moment(p49).value) < 1e-28);

    // Shallow levels do not engage.
    MomentProblem ps{6, 5, DirichletCharacter::principal(5), 2, 1, &theta3(),
                     false};
    CHECK(!vertical_stability(ps).has_value());
    MomentProblem pe{5, 4, DirichletCharacter::kronecker_character(-4), 1, 1,
                     &e11_form(), false};
    CHECK(!vertical_stability(pe).has_value());
    // Only stated at the central point.
    MomentProblem po{17, 5,
                     DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}}),
                     1, 3, &delta500(), false};
    CHECK(!vertical_stability(po).has_value());
}

TEST_CASE("root numbers and the archimedean factor") {
    DirichletCharacter chi = DirichletCharacter::kronecker_character(-7);
    DirichletCharacter triv11 = DirichletCharacter::principal(11);
    // k > l uses chi(-1); k <= l swaps in eps(-1).
    Cplx a = root_number(5, 2, chi, triv11, Cplx::i(), Cplx(1L));
    CHECK(cdist(a, Cplx(1L)) < 1e-30);
    Cplx b = root_number(2, 5, chi, triv11, Cplx::i(), Cplx(1L));
    CHECK(cdist(b, Cplx(-1L)) < 1e-30);
    // Unitarity for unit pseudo-eigenvalues.
    Cplx eta{Real("0.6"), Real("0.8")};
    Cplx c = root_number(8, 3, DirichletCharacter::principal(3),
                         DirichletCharacter::kronecker_character(-7), eta, eta);
    CHECK(std::abs(c.abs().to_double() - 1.0) < 1e-25);

    // gamma(s+1)/gamma(s) = (s + |k-l|/2)(s + (k+l)/2 - 1)/(4 pi^2).
    for (auto [k, l] : {std::pair<long, long>{8, 3}, {17, 12}, {4, 1}}) {
        Cplx s{Real("0.7"), Real("0.4")};
        Cplx lhs = gamma_factor(k, l, s + Cplx(1L));
        Cplx ratio = (s + Cplx{Real(std::abs(k - l)) / Real(2), Real(0)}) *
                     (s + Cplx{Real(k + l) / Real(2) - Real(1), Real(0)});
        Real fourpi2 = Real(4) * const_pi() * const_pi();
        Cplx rhs = gamma_factor(k, l, s) * ratio / fourpi2;
        CHECK(rdist(lhs, rhs) < 1e-24);
    }
    // Central normalization spot check against the direct definition.
    Cplx half{Real(1) / Real(2), Real(0)};
    auto gamma_C = [](const Cplx& z) {
        return cgamma(z) * cpow(Real(2) * const_pi(), z * Real(-1)) * 2L;
    };
    Cplx direct = gamma_C(half + Cplx{Real(5) / Real(2), Real(0)}) *
                  gamma_C(half + Cplx{Real(29) / Real(2) - Real(1), Real(0)});
    CHECK(rdist(gamma_factor(17, 12, half), direct) < 1e-24);
}

TEST_CASE("symbolic recognition accepts clean values and refuses noise") {
    Real tiny("1e-30");
    Cplx v1{const_pi() * (Real(6) / Real(121)) * sqrt(Real(7)), Real(0)};
    auto r1 = recognize_symbolic(v1, tiny, {7});
    REQUIRE(r1.has_value());
    CHECK(r1->ratio == mpq_class(6, 121));
    CHECK(r1->pi_exp == 1);
    CHECK(r1->radicand == 7);

    Cplx v2{Real(3) / Real(4), Real(0)};
    auto r2 = recognize_symbolic(v2, tiny, {});
    REQUIRE(r2.has_value());
    CHECK(r2->ratio == mpq_class(3, 4));
    CHECK(r2->pi_exp == 0);
    CHECK(r2->radicand == 1);

    // pi/(3 sqrt 3) = (1/9) pi sqrt 3.
    Cplx v3{const_pi() / (Real(3) * sqrt(Real(3))), Real(0)};
    auto r3 = recognize_symbolic(v3, tiny, {});
    REQUIRE(r3.has_value());
    CHECK(r3->ratio == mpq_class(1, 9));
    CHECK(r3->pi_exp == 1);
    CHECK(r3->radicand == 3);

    // A 9-digit decimal with a tiny error bound has no small closed form.
    Cplx noise{Real("0.123456789"), Real(0)};
    CHECK(!recognize_symbolic(noise, tiny, {}).has_value());
    // With a loose bound some nearby closed form becomes acceptable, and the
    // reconstruction stays within ten times that bound.
    auto loose = recognize_symbolic(noise, Real("1e-3"), {});
    REQUIRE(loose.has_value());
    Real recon = Real(loose->ratio.get_num().get_si()) /
                 Real(loose->ratio.get_den().get_si()) *
                 sqrt(Real(loose->radicand));
    for (int i = 0; i < loose->pi_exp; ++i) recon = recon * const_pi();
    CHECK(std::abs(recon.to_double() - 0.123456789) <= 1e-2);

    // Nonreal values are never identified.
    Cplx complexv{Real(1) / Real(2), Real(1) / Real(3)};
    CHECK(!recognize_symbolic(complexv, tiny, {}).has_value());
}

TEST_CASE("malformed problems are rejected with specific errors") {
    DirichletCharacter chi5 =
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});

    MomentProblem no_form{8, 3, DirichletCharacter::principal(3), 1, 1, nullptr,
                          false};
    CHECK_THROWS_AS(finite_moment(no_form), std::invalid_argument);

    MomentProblem bad_m{8, 3, DirichletCharacter::principal(3), 0, 1, &g1_form(),
                        false};
    CHECK_THROWS_AS(finite_moment(bad_m), std::domain_error);

    MomentProblem mod_mismatch{8, 7, DirichletCharacter::principal(3), 1, 1,
                               &g1_form(), false};
    CHECK_THROWS_AS(finite_moment(mod_mismatch), std::invalid_argument);

    // chi parity must track (-1)^k.
    MomentProblem parity{8, 5, chi5, 1, 1, &g1_form(), false};
    CHECK_THROWS_AS(finite_moment(parity), std::domain_error);

    // k > l is required at critical points.
    MomentProblem heavy{5, 4, DirichletCharacter::kronecker_character(-4), 1, 1,
                        &delta500(), false};
    CHECK_THROWS_AS(finite_moment(heavy), std::domain_error);

    // 2s must be admissible: k + l odd here, so even 2s is rejected.
    MomentProblem off_parity{8, 3, DirichletCharacter::principal(3), 1, 2,
                             &g1_form(), false};
    CHECK_THROWS_AS(finite_moment(off_parity), std::domain_error);
    MomentProblem off_range{8, 3, DirichletCharacter::principal(3), 1, 7,
                            &g1_form(), false};
    CHECK_THROWS_AS(finite_moment(off_range), std::domain_error);

    // Non-squarefree levels never get as far as the evaluator.
    std::vector<Cplx> cs(4, Cplx(0L));
    cs[1] = Cplx(1L);
    CHECK_THROWS_AS(
        CuspForm(4, 9, DirichletCharacter::principal(9), cs, false, false),
        std::invalid_argument);

    // Data horizon: the cusp expansion at delta = 11 needs b(11 n).
    CuspForm short11 = elliptic_ap_form({0, -1, 1, -10, -20}, 11, 64);
    MomentProblem horizon{5, 7, DirichletCharacter::kronecker_character(-7), 1,
                          1, &short11, false};
    try {
        finite_moment(horizon);
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(std::string(e.what()).find("delta = 11") != std::string::npos);
    }
}

TEST_CASE("permissive weights are admitted with a warning") {
    DirichletCharacter chi4 = DirichletCharacter::kronecker_character(-4);
    MomentProblem p{3, 4, chi4, 1, 0, &theta3(), false};
    CHECK_THROWS_AS(finite_moment(p), std::domain_error);
    p.permissive_weight = true;
    MomentResult r = finite_moment(p);
    REQUIRE(!r.warnings.empty());
    CHECK(r.warnings[0].find("proven range") != std::string::npos);
    // k = 1 stays out even with the flag.
    MomentProblem p1{1, 4, chi4, 1, 0, &theta3(), true};
    CHECK_THROWS_AS(finite_moment(p1), std::domain_error);
}
