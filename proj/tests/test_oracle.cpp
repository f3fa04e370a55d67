#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rsm/oracle.hpp"
#include "rsm/special.hpp"

using namespace rsm;

namespace {

double cdist(const Cplx& a, const Cplx& b) {
    return (a - b).abs().to_double();
}

const CuspForm& delta800() {
    static CuspForm f = delta_form(800);
    return f;
}

const CuspForm& g1_form() {
    static CuspForm f =
        load_coefficients(std::string(RSM_DATA_DIR) + "/forms/g1_s7_7.coef");
    return f;
}

const CuspForm& theta3() {
    static CuspForm f = theta_imaginary_quadratic(3, {}, 60);
    return f;
}

DirichletCharacter chi5i() {
    return DirichletCharacter::from_values(5, {{2, Turn::make(1, 4)}});
}

long inv_mod(long d, long c) {
    for (long e = 1; e < c; ++e)
        if ((d * e) % c == 1) return e;
    return 0;
}

// Literal unit-sum Kloosterman and term-by-term c-summation, written straight
// from the definition with no shared code beyond the Bessel function.
Cplx delta_brute(long k, long N, const DirichletCharacter& chi, long m, long n,
                 long c_max) {
    Cplx acc;
    for (long c = N; c <= c_max; c += N) {
        Cplx kl;
        for (long d = 1; d <= c; ++d) {
            if (std::gcd(d, c) != 1) continue;
            long di = inv_mod(d % c, c);
            long phase = ((m % c) * d + (n % c) * di) % c;
            kl += chi.eval0(d) * Cplx::unit(Turn::make(phase, c));
        }
        Real x = Real(4) * const_pi() * sqrt(Real(m) * Real(n)) / Real(c);
        acc += kl * bessel_j(k - 1, x) / Real(c);
    }
    return Real(2) * const_pi() * ipow(k).conj() * acc;
}

}  // namespace

TEST_CASE("truncated Petersson term matches a literal summation") {
    struct Cfg {
        long k, N, m, n, c_max;
        DirichletCharacter chi;
    };
    std::vector<Cfg> cfgs = {
        {4, 3, 1, 1, 30, DirichletCharacter::kronecker_character(-3)},
        {5, 5, 2, 3, 40, chi5i()},
        {12, 1, 1, 1, 25, DirichletCharacter::principal(1)},
        {17, 5, 1, 4, 50, chi5i()},
        {8, 7, 2, 2, 35, DirichletCharacter::kronecker_character(-7)},
        {6, 4, 1, 3, 40, DirichletCharacter::kronecker_character(-4)},
        {9, 11, 1, 1, 44,
         DirichletCharacter::from_values(11, {{2, Turn::make(1, 10)}})},
        {4, 3, 3, 2, 33, DirichletCharacter::principal(3)},
    };
    for (const Cfg& c : cfgs) {
        PeterssonDelta d = petersson_delta(c.k, c.N, c.chi, c.m, c.n, c.c_max);
        Cplx brute = delta_brute(c.k, c.N, c.chi, c.m, c.n, c.c_max);
        CHECK(cdist(d.value, brute) < 1e-10);
        CHECK(d.tail_bound > 0.0);
    }
}

TEST_CASE("Petersson term is symmetric and real for the trivial character") {
    DirichletCharacter triv = DirichletCharacter::principal(1);
    for (auto [m, n] : std::vector<std::pair<long, long>>{{1, 2}, {2, 3}, {1, 5}}) {
        PeterssonDelta a = petersson_delta(12, 1, triv, m, n, 40);
        PeterssonDelta b = petersson_delta(12, 1, triv, n, m, 40);
        CHECK(cdist(a.value, b.value) < 1e-20);
        CHECK(std::abs(a.value.im.to_double()) < 1e-25);
    }
}

TEST_CASE("doubling the cutoff moves the value less than the claimed tail") {
    struct Cfg {
        long k, N, m, n, c_max;
        DirichletCharacter chi;
    };
    std::vector<Cfg> cfgs = {
        {4, 3, 1, 1, 40, DirichletCharacter::kronecker_character(-3)},
        {17, 5, 1, 2, 40, chi5i()},
        {8, 7, 1, 1, 28, DirichletCharacter::kronecker_character(-7)},
    };
    for (const Cfg& c : cfgs) {
        PeterssonDelta d1 = petersson_delta(c.k, c.N, c.chi, c.m, c.n, c.c_max);
        PeterssonDelta d2 =
            petersson_delta(c.k, c.N, c.chi, c.m, c.n, 2 * c.c_max);
        CHECK(cdist(d1.value, d2.value) <= d1.tail_bound);
        CHECK(d2.tail_bound <= d1.tail_bound);
    }
}

TEST_CASE("oracle covers the exact value away from the central point") {
    // s = 5/2: both truncation figures are finite and honest.
    MomentProblem p{17, 5, chi5i(), 1, 5, &delta800(), false};
    MomentResult exact = finite_moment(p);
    double prev_tail = 1e300;
    for (long n_max : {200L, 400L, 800L}) {
        OracleResult o = moment_oracle(p, 2000, n_max);
        double gap = cdist(o.value, exact.value);
        CHECK(gap <= o.bound.tail_estimate);
        CHECK(gap <= o.bound.rigorous_bound);
        CHECK(std::isfinite(o.bound.rigorous_bound));
        CHECK(o.bound.tail_estimate <= prev_tail);
        prev_tail = o.bound.tail_estimate;
    }

    // s = 3/2 converges conditionally: the absolute-value envelope diverges
    // (reported as +inf) but the honest estimate still covers the gap.
    MomentProblem p3{17, 5, chi5i(), 2, 3, &delta800(), false};
    MomentResult exact3 = finite_moment(p3);
    OracleResult o3 = moment_oracle(p3, 2000, 400);
    CHECK(cdist(o3.value, exact3.value) <= o3.bound.tail_estimate);
    CHECK(std::isinf(o3.bound.rigorous_bound));
}

TEST_CASE("oracle handles a vanishing leading coefficient") {
    // b(3) = 0 for the CM form: the diagonal term drops out and the moment is
    // carried entirely by the off-diagonal sum.
    DirichletCharacter chi3 = DirichletCharacter::kronecker_character(-3);
    MomentProblem p{17, 3, chi3, 3, 4, &g1_form(), false};
    CHECK(g1_form().b(3).is_zero());
    MomentResult exact = finite_moment(p);
    CHECK(!exact.value.is_zero());
    OracleResult o = moment_oracle(p, 1200, 200);
    CHECK(cdist(o.value, exact.value) <= o.bound.tail_estimate);
    // Re(s) = 2 sits exactly on the edge where the absolute envelope diverges.
    CHECK(std::isinf(o.bound.rigorous_bound));
}

TEST_CASE("parallel and serial evaluators are bit-identical") {
    MomentProblem p1{17, 5, chi5i(), 2, 5, &delta800(), false};
    MomentProblem p2{17, 3, DirichletCharacter::kronecker_character(-3), 1, 4,
                     &g1_form(), false};
    for (const MomentProblem* p : {&p1, &p2}) {
        OracleResult a = moment_oracle(*p, 600, 150);
        OracleResult b = moment_oracle_serial(*p, 600, 150);
        CHECK((a.value - b.value).is_zero());
        CHECK(a.bound.tail_estimate == b.bound.tail_estimate);
        CHECK(a.bound.rigorous_bound == b.bound.rigorous_bound);
        CHECK(a.bound.c_max == b.bound.c_max);
        CHECK(a.bound.n_max == b.bound.n_max);
    }
}

TEST_CASE("oracle equals its own assembly from Petersson terms") {
    MomentProblem p{17, 5, chi5i(), 1, 5, &delta800(), false};
    long c_max = 60, n_max = 40;
    OracleResult o = moment_oracle(p, c_max, n_max);

    Cplx lead = dirichlet_L(product(p.chi, p.g->nebentypus()), 5L).v;
    Cplx inner = p.g->b(1);  // b_m / m^s at m = 1
    for (long n = 1; n <= n_max; ++n) {
        PeterssonDelta d = petersson_delta(p.k, p.N, p.chi, p.m, n, c_max);
        inner += p.g->b(n) * d.value / pow(sqrt(Real(n)), 5L);
    }
    Cplx assembled = lead * inner;
    CHECK(cdist(o.value, assembled) < 1e-9 * (1.0 + assembled.abs().to_double()));
}

TEST_CASE("oracle rejects malformed or divergent requests") {
    MomentProblem good{17, 5, chi5i(), 1, 5, &delta800(), false};

    MomentProblem no_g = good;
    no_g.g = nullptr;
    CHECK_THROWS_AS(moment_oracle(no_g, 100, 50), std::invalid_argument);

    MomentProblem bad_m = good;
    bad_m.m = 0;
    CHECK_THROWS_AS(moment_oracle(bad_m, 100, 50), std::invalid_argument);

    CHECK_THROWS_AS(moment_oracle(good, 0, 50), std::invalid_argument);
    CHECK_THROWS_AS(moment_oracle(good, 100, 0), std::invalid_argument);

    MomentProblem wrong_mod = good;
    wrong_mod.N = 7;
    CHECK_THROWS_AS(moment_oracle(wrong_mod, 100, 50), std::invalid_argument);

    MomentProblem light{3, 4, DirichletCharacter::kronecker_character(-4), 1, 3,
                        &theta3(), true};
    CHECK_THROWS_AS(moment_oracle(light, 100, 50), std::invalid_argument);

    // The convergence wall at Re(s) = 5/4 is named in the message.
    MomentProblem central = good;
    central.twice_s = 2;
    try {
        moment_oracle(central, 100, 50);
        FAIL("expected domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("5/4") != std::string::npos);
    }

    // Horizon accounting names the shortfall.
    try {
        moment_oracle(good, 100, 2000);
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(std::string(e.what()).find("n = 800") != std::string::npos);
    }

    CHECK_THROWS_AS(petersson_delta(3, 1, DirichletCharacter::principal(1), 1,
                                    1, 30),
                    std::invalid_argument);
    CHECK_THROWS_AS(petersson_delta(12, 1, DirichletCharacter::principal(1), 0,
                                    1, 30),
                    std::invalid_argument);
}
