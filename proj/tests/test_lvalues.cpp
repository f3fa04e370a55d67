#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rsm/lvalues.hpp"

using namespace rsm;

namespace {

double cdist(const Cplx& a, const Cplx& b) {
    return (a - b).abs().to_double();
}

}  // namespace

TEST_CASE("riemann zeta special values through dirichlet_L") {
    DirichletCharacter one = DirichletCharacter::principal(1);

    PoleOr z2 = dirichlet_L(one, 2);
    Real pi2_6 = const_pi() * const_pi() / Real(6);
    CHECK(!z2.pole);
    CHECK(abs(z2.v.re - pi2_6).to_double() < 1e-25);

    PoleOr zm1 = dirichlet_L(one, -1);
    CHECK(std::abs(zm1.v.re.to_double() + 1.0 / 12.0) < 1e-25);

    PoleOr z0 = dirichlet_L(one, 0);
    CHECK(std::abs(z0.v.re.to_double() + 0.5) < 1e-25);

    CHECK(dirichlet_L(one, 1).pole);
    CHECK(dirichlet_L(DirichletCharacter::principal(6), 1).pole);

    // Nontrivial points, real and complex.
    PoleOr z25 = dirichlet_L(one, Cplx{Real("2.5"), Real(0)});
    CHECK(std::abs(z25.v.re.to_double() - 1.3414872572509171797567696933) < 1e-25);
    PoleOr zc = dirichlet_L(one, Cplx{Real(2), Real(1)});
    CHECK(std::abs(zc.v.re.to_double() - 1.1503557032549026717428499347) < 1e-22);
    CHECK(std::abs(zc.v.im.to_double() + 0.4375308659196078811175278986) < 1e-22);
}

TEST_CASE("quadratic character values at s = 1") {
    PoleOr a = dirichlet_L(DirichletCharacter::kronecker_character(-3), 1);
    CHECK(!a.pole);
    CHECK(std::abs(a.v.re.to_double() - 0.6045997880780726168646927525) < 1e-25);
    CHECK(std::abs(a.v.im.to_double()) < 1e-28);

    PoleOr b = dirichlet_L(DirichletCharacter::kronecker_character(-4), 1);
    CHECK(std::abs(b.v.re.to_double() - M_PI / 4) < 1e-15);

    PoleOr c = dirichlet_L(DirichletCharacter::kronecker_character(5), 1);
    CHECK(std::abs(c.v.re.to_double() - 0.4304089409640040388894332330) < 1e-25);
}

TEST_CASE("nonpositive integer values via generalized Bernoulli numbers") {
    DirichletCharacter e3 = DirichletCharacter::kronecker_character(-3);
    // B_{1, chi_-3} = -1/3, so L(chi_-3, 0) = 1/3.
    CHECK(cdist(generalized_bernoulli(e3, 1),
                Cplx{Real(-1) / Real(3), Real(0)}) < 1e-28);
    PoleOr l0 = dirichlet_L(e3, 0);
    CHECK(std::abs(l0.v.re.to_double() - 1.0 / 3.0) < 1e-28);

    // Parity mismatch forces the Bernoulli number (and L-value) to vanish.
    CHECK(generalized_bernoulli(e3, 2).abs().to_double() < 1e-28);
    CHECK(dirichlet_L(e3, -1).v.abs().to_double() < 1e-25);
    DirichletCharacter e5 = DirichletCharacter::kronecker_character(5);
    CHECK(generalized_bernoulli(e5, 1).abs().to_double() < 1e-28);
    CHECK(dirichlet_L(e5, 0).v.abs().to_double() < 1e-25);

    // Trivial character: B_1 = 1/2 reproduces zeta(0) = -1/2.
    DirichletCharacter one = DirichletCharacter::principal(1);
    CHECK(cdist(generalized_bernoulli(one, 1), Cplx{Real(1) / Real(2), Real(0)}) <
          1e-28);
    // L(chi, 1 - n) = -B_{n, chi}/n across characters and depths.
    for (long n = 1; n <= 6; ++n) {
        Cplx bn = generalized_bernoulli(e3, static_cast<int>(n));
        Cplx expect = bn * (Real(-1) / Real(n));
        CHECK(cdist(dirichlet_L(e3, 1 - n).v, expect) < 1e-24);
    }
}

TEST_CASE("hurwitz zeta identities") {
    // zeta(s, 1) = zeta(s).
    Cplx s{Real("2.5"), Real(0)};
    CHECK(std::abs(hurwitz_zeta(s, Real(1)).re.to_double() -
                   1.3414872572509171797567696933) < 1e-25);

    // zeta(2, 1/2) = pi^2/2.
    Cplx two(2L);
    CHECK(std::abs(hurwitz_zeta(two, Real(1) / Real(2)).re.to_double() -
                   4.9348022005446793094172454999) < 1e-24);

    // zeta(-1, a) = -B_2(a)/2: at a = 1/4 the value is 1/96.
    Cplx sm1(-1L);
    CHECK(std::abs(hurwitz_zeta(sm1, Real(1) / Real(4)).re.to_double() -
                   1.0 / 96.0) < 1e-26);

    // Partition identity sum_{a=1}^{q} zeta(s, a/q) = q^s zeta(s).
    for (long q : {3L, 4L, 5L}) {
        for (auto sv : {Cplx{Real(3), Real(0)}, Cplx{Real("2.5"), Real("1.5")}}) {
            Cplx lhs;
            for (long a = 1; a <= q; ++a)
                lhs += hurwitz_zeta(sv, Real(a) / Real(q));
            Cplx qs = cpow(q, sv);
            Cplx rhs = qs * dirichlet_L(DirichletCharacter::principal(1), sv).v;
            CHECK(cdist(lhs, rhs) / rhs.abs().to_double() < 1e-24);
        }
    }
}

TEST_CASE("digamma slow path for L(chi, 1)") {
    std::vector<DirichletCharacter> chars = {
        DirichletCharacter::kronecker_character(-3),
        DirichletCharacter::kronecker_character(-7),
        DirichletCharacter::kronecker_character(8),
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}}),
        DirichletCharacter::from_values(11, {{2, Turn::make(1, 10)}}),
    };
    for (const DirichletCharacter& chi : chars) {
        Cplx slow = dirichlet_L1_digamma(chi);
        PoleOr fast = dirichlet_L(chi, 1);
        REQUIRE(!fast.pole);
        CHECK(cdist(slow, fast.v) < 1e-24);
    }
}

TEST_CASE("functional equation at s = 0 for odd primitive characters") {
    std::vector<DirichletCharacter> odds = {
        DirichletCharacter::kronecker_character(-3),
        DirichletCharacter::kronecker_character(-4),
        DirichletCharacter::kronecker_character(-7),
        DirichletCharacter::kronecker_character(-8),
        DirichletCharacter::kronecker_character(-11),
        DirichletCharacter::kronecker_character(-19),
        DirichletCharacter::kronecker_character(-43),
        DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}}),
        DirichletCharacter::from_values(9, {{2, Turn::make(1, 6)}}),
        DirichletCharacter::from_values(11, {{2, Turn::make(1, 10)}}),
    };
    for (const DirichletCharacter& eps : odds) {
        REQUIRE(eps.parity() == -1);
        REQUIRE(eps.is_primitive());
        auto [lhs, rhs] = functional_equation_L0(eps);
        CHECK(cdist(lhs, rhs) < 1e-24);
        // And the left side really is L(eps, 0).
        CHECK(cdist(lhs, dirichlet_L(eps, 0).v) < 1e-25);
    }
}

TEST_CASE("imprimitive characters reduce with Euler factors restored") {
    DirichletCharacter prim = DirichletCharacter::kronecker_character(5);
    DirichletCharacter lifted = product(prim, DirichletCharacter::principal(9));
    REQUIRE(lifted.modulus() == 45);
    for (auto sv : {Cplx{Real(2), Real(0)}, Cplx{Real("1.5"), Real("-0.5")}}) {
        Cplx full = dirichlet_L(prim, sv).v;
        Cplx reduced = dirichlet_L(lifted, sv).v;
        // Missing factor at p = 3: multiply by (1 - chi5(3) 3^{-s}).
        Cplx fac = Cplx(1L) - prim.eval0(3) * cpow(3, sv * Real(-1));
        CHECK(cdist(reduced, full * fac) < 1e-24);
    }
}

TEST_CASE("local Euler products and complements") {
    DirichletCharacter chi = DirichletCharacter::kronecker_character(-3);
    Cplx two(2L);
    // euler_local * euler_complement recovers the full L-value.
    Cplx loc = euler_local(chi, two, 10);
    PoleOr comp = euler_complement(chi, two, 10);
    REQUIRE(!comp.pole);
    CHECK(cdist(loc * comp.v, dirichlet_L(chi, 2).v) < 1e-25);

    // Ramified primes contribute trivial factors.
    CHECK(cdist(euler_local(chi, two, 3), Cplx(1L)) < 1e-30);

    // A vanishing local factor is rejected.
    CHECK_THROWS(euler_local(DirichletCharacter::principal(1), Cplx(0L), 2));

    // Complement of the trivial character at s = 1 keeps the tagged pole.
    CHECK(euler_complement(DirichletCharacter::principal(1), Cplx(1L), 6).pole);
}
