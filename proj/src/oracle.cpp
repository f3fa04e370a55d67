#include "rsm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsm/arith.hpp"
#include "rsm/factor.hpp"
#include "rsm/forms.hpp"
#include "rsm/lvalues.hpp"
#include "rsm/special.hpp"

namespace rsm {
namespace {

constexpr double kPi = 3.14159265358979323846264338328;

// Bessel arguments below this threshold are not summed explicitly; the
// excluded mass is charged to the truncation accounting through the
// C_k x^{k-1} small-argument regime.  At the reference order k-1 = 16,
// C_16 x^16 is about 4.8e-14 at x = 2.
constexpr double kXCut = 2.0;

// Number of c values handed to the workers per batch.  Contributions are
// merged in ascending-c order after each batch, so the summation order (and
// hence every bit of the result) is independent of the worker count.
constexpr long kBlock = 64;

// Generous multiplier covering the length of the per-n accumulation across c
// in the round-off allowance.
constexpr double kAccumSlack = 512.0;

long inv_mod(long a, long c) {
    long r0 = c, r1 = a % c;
    long t0 = 0, t1 = 1;
    while (r1 != 0) {
        long q = r0 / r1;
        long r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        long t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
    }
    return t0 < 0 ? t0 + c : t0;
}

double tau_of(long c) {
    double t = 1.0;
    for (const auto& [p, e] : factorize(c)) {
        (void)p;
        t *= e + 1;
    }
    return t;
}

// sum_{n > M} n^{-e}, e > 1.
double tail_plain(double e, double M) {
    return std::pow(M, 1.0 - e) / (e - 1.0);
}

// sum_{n > M} n^{-e} log n, e > 1.  (log x / x^e is decreasing beyond
// e^{1/(e-1)} <= 8 in the range we use, so the integral bound applies.)
double tail_log(double e, double M) {
    double m = std::max(M, 8.0);
    double extra = (M < 8.0) ? 8.0 * std::log(8.0) : 0.0;  // crude cover for n <= 8
    double em1 = e - 1.0;
    return extra + std::pow(m, -em1) * (std::log(m) / em1 + 1.0 / (em1 * em1));
}

// Per-c contribution to the off-diagonal accumulator, computed independently
// of every other c (and therefore safe to evaluate on a worker thread).
struct CContrib {
    long n_begin = 0;             // first explicitly summed n; 0 = none
    std::vector<double> vr, vi;   // S_chi(m,n;c)/c * J_{k-1}(x) for n_begin..n_max
    std::vector<double> wvals;    // round-off weight for the same range
    double skip_mass = 0.0;       // Weil/Bessel bound on the skipped n < n_begin
};

// skip_prefix[j] = sum_{n <= j} |b_n| n^{-sigma} n^{(k-1)/2}; with the Weil
// bound (m,n,c) <= m and |J_{k-1}(x)| <= C_k x^{k-1} the whole skipped range
// of one c costs a single prefix-sum lookup.
CContrib contribution_of_c(long c, long k, long N, long m, long n_max,
                           const std::vector<double>& chi_re,
                           const std::vector<double>& chi_im,
                           const std::vector<double>& skip_prefix, double c_k) {
    CContrib out;
    const double fourpi = 4.0 * kPi;

    double thresh = (kXCut * c) / fourpi;
    thresh = thresh * thresh / m;  // smallest explicitly summed n, minus one
    long n0 = thresh >= static_cast<double>(n_max)
                  ? n_max + 1
                  : static_cast<long>(std::floor(thresh)) + 1;

    long skip_top = std::min(n0 - 1, n_max);
    if (skip_top >= 1) {
        double ratio = fourpi * std::sqrt(static_cast<double>(m)) / c;
        out.skip_mass = m * tau_of(c) / std::sqrt(static_cast<double>(c)) *
                        c_k * std::pow(ratio, k - 1) * skip_prefix[skip_top];
    }
    if (n0 > n_max) return out;

    // Unit tables mod c for the twisted Kloosterman sums.
    std::vector<long> units;
    for (long a = 1; a < c; ++a)
        if (std::gcd(a, c) == 1) units.push_back(a);
    const long phi = static_cast<long>(units.size());

    std::vector<double> er(c), ei(c);
    for (long j = 0; j < c; ++j) {
        double ang = 2.0 * kPi * j / c;
        er[j] = std::cos(ang);
        ei[j] = std::sin(ang);
    }

    const long len = n_max - n0 + 1;
    out.n_begin = n0;
    out.vr.assign(len, 0.0);
    out.vi.assign(len, 0.0);
    out.wvals.assign(len, 0.0);

    double* __restrict vr = out.vr.data();
    double* __restrict vi = out.vi.data();

    for (long a : units) {
        // w = chi(a) e(m a / c); the n-dependent factor e(n abar / c) walks
        // the root-of-unity table with stride abar.
        long ma = static_cast<long>(static_cast<__int128>(m) * a % c);
        long ca = a % N;
        double wr = chi_re[ca] * er[ma] - chi_im[ca] * ei[ma];
        double wi = chi_re[ca] * ei[ma] + chi_im[ca] * er[ma];
        long ab = inv_mod(a, c);
        long idx = static_cast<long>(static_cast<__int128>(n0 % c) * ab % c);
        for (long i = 0; i < len; ++i) {
            vr[i] += wr * er[idx] - wi * ei[idx];
            vi[i] += wr * ei[idx] + wi * er[idx];
            idx += ab;
            if (idx >= c) idx -= c;
        }
    }

    const double wconst = static_cast<double>(phi) * phi + kAccumSlack * phi;
    for (long i = 0; i < len; ++i) {
        long n = n0 + i;
        double x = fourpi * std::sqrt(static_cast<double>(m) * n) / c;
        double j = bessel_j_fast(k - 1, x) / c;
        out.wvals[i] = wconst * std::abs(j);
        out.vr[i] *= j;
        out.vi[i] *= j;
    }
    return out;
}

struct SeriesTails {
    double skip = 0.0;    // x < kXCut region inside c <= c_max, n <= n_max
    double c_tail = 0.0;  // c > c_max, n <= n_max
    double n_tail = 0.0;  // n > n_max, all c (+inf unless Re(s) > 2)
};

// Absolute-value envelope of the n > n_max tail of the full double sum,
// assuming |b_n| <= coeff_B * d(n):  per n, the c-sum splits at
// Cx = 4 pi sqrt(mn) / kXCut into an oscillatory piece (|J| <= 1.5 x^{-1/2})
// and a power piece (|J| <= C_k x^{k-1}); with d(n) < 2 sqrt(n) the n-sum is
// summable exactly when Re(s) > 2.
double n_tail_bound(long k, long N, long m, long n_max, double sigma,
                    double coeff_B, double c_k) {
    if (sigma <= 2.0) return std::numeric_limits<double>::infinity();
    double tauN = tau_of(N);
    double q1 = 1.5 * std::sqrt(kPi) * m * tauN / N;
    double q2 = 8.0 * kPi * m * c_k * std::pow(kXCut, k - 2) / (k - 2);
    double A = std::max(0.0, std::log(2.0 * kPi * std::sqrt((double)m) / N) + 1.0);
    double M = static_cast<double>(n_max);
    double osc = 2.0 * coeff_B * q1 * std::pow((double)m,  0.25) *
                 (A * tail_plain(sigma - 0.75, M) + 0.5 * tail_log(sigma - 0.75, M));
    double pow_piece = 2.0 * coeff_B * q2 * std::sqrt((double)m) *
                       tail_plain(sigma - 1.0, M);
    return osc + pow_piece;
}

// Absolute-value envelope of the c > c_max region for n <= n_max, using the
// actual coefficient magnitudes.
double c_tail_bound(long k, long N, long m, long n_max, long c_max,
                    double sigma, const std::vector<double>& b_abs,
                    double c_k) {
    const double fourpi = 4.0 * kPi;
    double total = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        double base = b_abs[n] * std::pow(static_cast<double>(n), -sigma);
        if (base == 0.0) continue;
        double G = static_cast<double>(std::gcd(m, n));
        double xmn = fourpi * std::sqrt(static_cast<double>(m) * n);
        double Cx = xmn / kXCut;
        double piece = 0.0;
        if (static_cast<double>(c_max) < Cx) {
            // Bounded-J region: tau(c)/sqrt(c) <= 2 and |J| <= 1 per term.
            double first = static_cast<double>(c_max / N + 1);
            double last = std::floor(Cx / N);
            if (last >= first) piece += 2.0 * G * (last - first + 1.0);
        }
        double Cstar = std::max({static_cast<double>(c_max), Cx,
                                 static_cast<double>(N)});
        piece += 2.0 * G * c_k * std::pow(xmn / Cstar, k - 2) * xmn / (k - 2);
        total += base * piece;
    }
    return total;
}

OracleResult oracle_core(const MomentProblem& p, long c_max, long n_max,
                         bool parallel) {
    if (p.g == nullptr)
        throw std::invalid_argument("moment_oracle: a fixed cusp form g is required");
    if (p.m < 1) throw std::invalid_argument("moment_oracle: m must be positive");
    if (c_max < 1 || n_max < 1)
        throw std::invalid_argument("moment_oracle: c_max and n_max must be positive");
    if (p.chi.modulus() != p.N)
        throw std::invalid_argument(
            "moment_oracle: chi must be defined modulo the level N = " +
            std::to_string(p.N));
    if (p.k < 4)
        throw std::invalid_argument(
            "moment_oracle: weight k >= 4 required (the J_{k-1} decay constants "
            "assume it)");
    if (p.twice_s <= 2)
        throw std::domain_error(
            "moment_oracle: the double sum converges absolutely only for "
            "Re(s) > 5/4; s = " + std::to_string(p.twice_s) + "/2 was requested");

    const long need = std::max(p.m, n_max);
    if (p.g->horizon() < need)
        throw InsufficientData(
            "moment_oracle: the fixed form provides coefficients up to n = " +
            std::to_string(p.g->horizon()) + " but the run needs n = " +
            std::to_string(need));

    const long k = p.k, N = p.N, m = p.m;
    const double sigma = static_cast<double>(p.twice_s) / 2.0;
    const double c_k = bessel_bound_small_const(k - 1);

    // Coefficient tables (double) and the divisor-count sieve for the
    // measured Ramanujan-type constant B.
    std::vector<double> b_re(n_max + 1, 0.0), b_im(n_max + 1, 0.0),
        b_abs(n_max + 1, 0.0);
    std::vector<int> dcnt(n_max + 1, 0);
    for (long d = 1; d <= n_max; ++d)
        for (long j = d; j <= n_max; j += d) ++dcnt[j];
    double coeff_B = 0.0;
    for (long n = 1; n <= n_max; ++n) {
        Cplx b = p.g->b(n);
        b_re[n] = b.re.to_double();
        b_im[n] = b.im.to_double();
        b_abs[n] = std::hypot(b_re[n], b_im[n]);
        coeff_B = std::max(coeff_B, b_abs[n] / dcnt[n]);
    }

    // chi value table mod N.
    std::vector<double> chi_re(N, 0.0), chi_im(N, 0.0);
    for (long a = 0; a < N; ++a) {
        Cplx v = p.chi.eval0(a);
        chi_re[a] = v.re.to_double();
        chi_im[a] = v.im.to_double();
    }

    // Prefix sums for the skipped-mass accounting.
    std::vector<double> skip_prefix(n_max + 1, 0.0);
    for (long n = 1; n <= n_max; ++n)
        skip_prefix[n] = skip_prefix[n - 1] +
                         b_abs[n] * std::pow(static_cast<double>(n),
                                             0.5 * (k - 1) - sigma);

    std::vector<long> cs;
    for (long c = N; c <= c_max; c += N) cs.push_back(c);

    std::vector<double> acc_r(n_max + 1, 0.0), acc_i(n_max + 1, 0.0),
        werr(n_max + 1, 0.0);
    double skip_total = 0.0;

    for (std::size_t base = 0; base < cs.size();
         base += static_cast<std::size_t>(kBlock)) {
        const long bn = static_cast<long>(
            std::min(cs.size() - base, static_cast<std::size_t>(kBlock)));
        std::vector<CContrib> block(bn);
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (long bi = 0; bi < bn; ++bi)
            block[bi] = contribution_of_c(cs[base + bi], k, N, m, n_max, chi_re,
                                          chi_im, skip_prefix, c_k);
        // Deterministic ordered reduction: ascending c, independent of worker
        // scheduling.
        for (long bi = 0; bi < bn; ++bi) {
            const CContrib& cc = block[bi];
            skip_total += cc.skip_mass;
            if (cc.n_begin == 0) continue;
            const long len = static_cast<long>(cc.vr.size());
            for (long i = 0; i < len; ++i) {
                acc_r[cc.n_begin + i] += cc.vr[i];
                acc_i[cc.n_begin + i] += cc.vi[i];
                werr[cc.n_begin + i] += cc.wvals[i];
            }
        }
    }

    // Assemble the off-diagonal n-series (Kahan-compensated, ascending n)
    // with a snapshot at n_max/2 for the Cauchy-difference estimator.
    double off_r = 0.0, off_i = 0.0, comp_r = 0.0, comp_i = 0.0;
    double half_r = 0.0, half_i = 0.0;
    double abs_terms = 0.0, wsum = 0.0;
    const long half = n_max / 2;
    for (long n = 1; n <= n_max; ++n) {
        double nw = std::pow(static_cast<double>(n), -sigma);
        double tr = (b_re[n] * acc_r[n] - b_im[n] * acc_i[n]) * nw;
        double ti = (b_re[n] * acc_i[n] + b_im[n] * acc_r[n]) * nw;
        double y = tr - comp_r, t = off_r + y;
        comp_r = (t - off_r) - y;
        off_r = t;
        y = ti - comp_i;
        t = off_i + y;
        comp_i = (t - off_i) - y;
        off_i = t;
        abs_terms += std::hypot(tr, ti);
        wsum += b_abs[n] * nw * werr[n];
        if (n == half) {
            half_r = off_r;
            half_i = off_i;
        }
    }

    // Exact-side factors in working precision.
    PoleOr L = dirichlet_L(product(p.chi, p.g->nebentypus()), p.twice_s);
    if (L.pole)
        throw std::domain_error("moment_oracle: L(chi eps, 2s) has a pole");
    Cplx lead = p.g->b(m) / pow(sqrt(Real(m)), p.twice_s);
    Cplx pref = ipow(-k) * (Real(2) * const_pi());
    Cplx off{Real(off_r), Real(off_i)};
    Cplx value = L.v * (lead + pref * off);

    const double Labs = L.v.abs().to_double();
    const double eps = std::numeric_limits<double>::epsilon();
    const double twopi = 2.0 * kPi;

    double round_allow = Labs * twopi * eps * (wsum + 4.0 * abs_terms) +
                         4.0e-15 * value.mag_d();
    value.err += round_allow;

    double cauchy = 4.0 * Labs * twopi * std::hypot(off_r - half_r, off_i - half_i);
    double ctail = c_tail_bound(k, N, m, n_max, c_max, sigma, b_abs, c_k);
    double ntail = n_tail_bound(k, N, m, n_max, sigma, coeff_B, c_k);

    OracleResult res;
    res.value = value;
    res.bound.c_max = c_max;
    res.bound.n_max = n_max;
    res.bound.tail_estimate =
        cauchy + Labs * twopi * (skip_total + ctail) + round_allow;
    res.bound.rigorous_bound =
        Labs * twopi * (skip_total + ctail + ntail) + round_allow;
    res.bound.weil_constant = 1.0;
    res.bound.bessel_power_constant = c_k;
    res.bound.bessel_decay_constant = kBesselHalfConst;
    return res;
}

}  // namespace

PeterssonDelta petersson_delta(long k, long N, const DirichletCharacter& chi,
                               long m, long n, long c_max) {
    if (k < 4)
        throw std::invalid_argument("petersson_delta: weight k >= 4 required");
    if (m < 1 || n < 1)
        throw std::invalid_argument("petersson_delta: m, n must be positive");
    if (chi.modulus() != N)
        throw std::invalid_argument(
            "petersson_delta: chi must be defined modulo N");

    Cplx sum(Real(0L), Real(0L));
    Real xbase = Real(4) * const_pi() * sqrt(Real(m) * Real(n));
    for (long c = N; c <= c_max; c += N) {
        Cplx S = kloosterman(chi, m, n, c);
        Real x = xbase / Real(c);
        sum += S * (bessel_j(k - 1, x) / Real(c));
    }
    PeterssonDelta out;
    out.value = (ipow(-k) * (Real(2) * const_pi())) * sum;

    // Tail over c > c_max: Weil bound with (m,n,c) <= gcd(m,n) and
    // tau(c)/sqrt(c) <= 2; |J| <= 1 until the argument drops below kXCut,
    // then the C_k x^{k-1} power regime.
    const double c_k = bessel_bound_small_const(static_cast<int>(k - 1));
    const double G = static_cast<double>(std::gcd(m, n));
    const double xmn = 4.0 * kPi * std::sqrt(static_cast<double>(m) * n);
    const double Cx = xmn / kXCut;
    double tail = 0.0;
    if (static_cast<double>(c_max) < Cx) {
        double first = static_cast<double>(c_max / N + 1);
        double last = std::floor(Cx / N);
        if (last >= first) tail += 2.0 * G * (last - first + 1.0);
    }
    double Cstar = std::max({static_cast<double>(c_max), Cx,
                             static_cast<double>(N)});
    tail += 2.0 * G * c_k * std::pow(xmn / Cstar, k - 2) * xmn / (k - 2);
    out.tail_bound = 2.0 * kPi * tail;
    return out;
}

OracleResult moment_oracle(const MomentProblem& p, long c_max, long n_max) {
    return oracle_core(p, c_max, n_max, true);
}

OracleResult moment_oracle_serial(const MomentProblem& p, long c_max,
                                  long n_max) {
    return oracle_core(p, c_max, n_max, false);
}

}  // namespace rsm
