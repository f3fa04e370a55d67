#include "rsm/forms.hpp"

#include "rsm/factor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rsm {

namespace {

Real parse_entry(const std::string& tok) {
  if (tok.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(tok, 10) != 0) throw std::runtime_error("bad rational entry: " + tok);
    q.canonicalize();
    return Real(q);
  }
  try {
    return Real(tok);
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("bad numeric entry: " + tok);
  }
}

mpz_class mpz_from_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
  mpz_class hi(static_cast<unsigned long>(u >> 64));
  mpz_class out = (hi << 64) + mpz_class(static_cast<unsigned long>(u));
  return neg ? -out : out;
}

// Coefficients of eta(q)^24 / q^{-1}: tau(n) for n = 1..H via
// eta^3 (sparse, Jacobi) -> eta^6 -> eta^12 -> eta^24 convolutions.
std::vector<mpz_class> tau_table(long H) {
  // eta^3 * q^{-1/8} = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}
  std::vector<long> e3(H + 1, 0);
  for (long k = 0;; ++k) {
    long idx = k * (k + 1) / 2;
    if (idx > H) break;
    e3[idx] = (k % 2 == 0 ? 1 : -1) * (2 * k + 1);
  }
  std::vector<long> sparse_idx;
  for (long i = 0; i <= H; ++i)
    if (e3[i] != 0) sparse_idx.push_back(i);
  std::vector<__int128> e6(H + 1, 0);
  for (long i : sparse_idx)
    for (long j : sparse_idx) {
      if (i + j > H) break;
      e6[i + j] += static_cast<__int128>(e3[i]) * e3[j];
    }
  std::vector<__int128> e12(H + 1, 0);
  for (long i = 0; i <= H; ++i) {
    if (e6[i] == 0) continue;
    for (long j = 0; i + j <= H; ++j) e12[i + j] += e6[i] * e6[j];
  }
  std::vector<__int128> e24(H + 1, 0);
  for (long i = 0; i <= H; ++i) {
    if (e12[i] == 0) continue;
    for (long j = 0; i + j <= H; ++j) e24[i + j] += e12[i] * e12[j];
  }
  // Delta = q * eta-product, so tau(n) is the q^{n-1} coefficient above.
  std::vector<mpz_class> tau(H + 1);
  for (long n = 1; n <= H; ++n) tau[n] = mpz_from_i128(e24[n - 1]);
  return tau;
}

}  // namespace

CuspForm::CuspForm(long weight, long level, DirichletCharacter eps, std::vector<Cplx> coeffs,
                   bool is_newform, bool is_eigenform)
    : weight_(weight), level_(level), eps_(std::move(eps)), coeffs_(std::move(coeffs)),
      is_newform_(is_newform), is_eigenform_(is_eigenform) {
  if (weight_ < 1) throw std::invalid_argument("CuspForm: weight must be positive");
  if (level_ < 1 || !is_squarefree(level_))
    throw std::invalid_argument("CuspForm: level must be positive and squarefree");
  if (eps_.modulus() != level_)
    throw std::invalid_argument("CuspForm: nebentypus modulus must equal the level");
  int sign = weight_ % 2 == 0 ? 1 : -1;
  if (eps_.parity() != sign)
    throw std::invalid_argument("CuspForm: nebentypus parity must match the weight");
  if (coeffs_.size() < 2) throw std::invalid_argument("CuspForm: no coefficients");
}

Cplx CuspForm::b(long n) const {
  if (n < 1) throw std::invalid_argument("CuspForm::b: index must be positive");
  if (n > horizon())
    throw InsufficientData("coefficient b_" + std::to_string(n) + " is beyond the horizon " +
                           std::to_string(horizon()));
  return coeffs_[n];
}

long CuspForm::cusp_horizon(long delta) const {
  if (delta < 1 || level_ % delta != 0)
    throw std::invalid_argument("cusp_horizon: delta must divide the level");
  if (delta == 1) return horizon();
  auto it = cusp_data_.find(delta);
  if (it != cusp_data_.end()) return static_cast<long>(it->second.size()) - 1;
  if (delta != level_) return 0;  // intermediate cusp without data
  if (eps_.is_primitive() && level_ > 1) return horizon();
  if (eps_.is_principal()) return horizon() / level_;
  return 0;
}

Cplx CuspForm::b_cusp(long delta, long n) const {
  if (delta < 1 || level_ % delta != 0)
    throw std::invalid_argument("b_cusp: delta must divide the level");
  if (n < 1) throw std::invalid_argument("b_cusp: index must be positive");
  if (delta == 1) return b(n);
  auto it = cusp_data_.find(delta);
  if (it != cusp_data_.end()) {
    if (n >= static_cast<long>(it->second.size()))
      throw InsufficientData("cusp coefficient b^" + std::to_string(delta) + "_" +
                             std::to_string(n) + " is beyond the supplied data");
    return it->second[n];
  }
  if (delta != level_)
    throw std::domain_error("b_cusp: no closed form for an intermediate cusp; supply data");
  if (eps_.is_primitive() && level_ > 1) {
    // b_n^D = eps(-1) (tau(eps)/sqrt(D)) conj(b_D b_n); requires a newform
    // with b_1 = 1 and |b_D| = 1.
    if (!is_newform_)
      throw std::domain_error("b_cusp: the primitive-nebentypus rule needs a newform");
    Cplx bD = b(level_);
    if (std::abs(bD.abs().to_double() - 1.0) > 1e-9)
      throw std::domain_error("b_cusp: |b_D| = 1 fails for the primitive-nebentypus rule");
    Cplx w = gauss_sum(eps_) / sqrt(Real(level_));
    if (eps_.parity() < 0) w = -w;
    return w * (bD * b(n)).conj();
  }
  if (eps_.is_principal()) {
    // b_n^D = mu(D) sqrt(D) b_{nD} for squarefree D and trivial nebentypus.
    if (!is_eigenform_)
      throw std::domain_error("b_cusp: the trivial-nebentypus rule needs an eigenform");
    return Real(mobius(level_)) * sqrt(Real(level_)) * b(n * level_);
  }
  throw std::domain_error("b_cusp: nebentypus neither primitive nor trivial; supply data");
}

void CuspForm::set_cusp_data(long delta, std::vector<Cplx> coeffs) {
  if (delta <= 1 || level_ % delta != 0)
    throw std::invalid_argument("set_cusp_data: delta must properly divide the level");
  cusp_data_[delta] = std::move(coeffs);
}

CuspForm load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
  long weight = 0, level = 0;
  std::string neb_spec = "principal(1)";
  std::string normalization = "analytic";
  std::vector<std::pair<long, Cplx>> entries;
  long max_n = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto eq = first.find('=');
    if (eq != std::string::npos) {
      std::string key = first.substr(0, eq);
      std::string val = first.substr(eq + 1);
      std::string rest;
      if (std::getline(ls, rest)) {
        // permit spaces inside the value (e.g. serialized characters)
        val += rest;
        val.erase(std::remove(val.begin(), val.end(), ' '), val.end());
      }
      if (key == "weight") weight = std::stol(val);
      else if (key == "level") level = std::stol(val);
      else if (key == "nebentypus") neb_spec = val;
      else if (key == "normalization") normalization = val;
      else throw std::runtime_error("unknown header key '" + key + "' at line " + std::to_string(lineno));
      continue;
    }
    long n = 0;
    try {
      n = std::stol(first);
    } catch (...) {
      throw std::runtime_error("malformed coefficient line " + std::to_string(lineno));
    }
    if (n < 1) throw std::runtime_error("coefficient index must be positive at line " + std::to_string(lineno));
    std::string tok_re, tok_im;
    if (!(ls >> tok_re)) throw std::runtime_error("missing value at line " + std::to_string(lineno));
    Real re = parse_entry(tok_re);
    Real im(0);
    if (ls >> tok_im) im = parse_entry(tok_im);
    entries.emplace_back(n, Cplx(re, im));
    max_n = std::max(max_n, n);
  }
  if (weight <= 0) throw std::runtime_error("coefficient file missing a positive weight= header");
  if (level <= 0) throw std::runtime_error("coefficient file missing a positive level= header");
  if (normalization != "raw" && normalization != "analytic")
    throw std::runtime_error("normalization must be 'raw' or 'analytic'");
  if (entries.empty()) throw std::runtime_error("coefficient file has no coefficient lines");
  std::vector<Cplx> coeffs(max_n + 1);
  for (auto& [n, v] : entries) {
    if (normalization == "raw" && weight > 1)
      v = v / pow(Real(n), Real(weight - 1) / 2);
    coeffs[n] = v;
  }
  DirichletCharacter eps = DirichletCharacter::parse(neb_spec);
  bool unit_b1 = std::abs(coeffs[1].abs().to_double() - 1.0) < 1e-12 && coeffs[1].im.is_zero();
  return CuspForm(weight, level, std::move(eps), std::move(coeffs), unit_b1, unit_b1);
}

CuspForm delta_form(long horizon) {
  if (horizon < 2) horizon = 2;
  std::vector<mpz_class> tau = tau_table(horizon);
  std::vector<Cplx> coeffs(horizon + 1);
  for (long n = 1; n <= horizon; ++n)
    coeffs[n] = Cplx(Real(tau[n]) / pow(Real(n), Real(11) / 2));
  return CuspForm(12, 1, DirichletCharacter::principal(1), std::move(coeffs), true, true);
}

std::vector<std::tuple<long, long, long>> reduced_forms(long D) {
  std::vector<std::tuple<long, long, long>> out;
  for (long a = 1; 3 * a * a <= D + 3; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      long num = b * b + D;
      if (num % (4 * a) != 0) continue;
      long c = num / (4 * a);
      if (c < a) continue;
      if (a == c && b < 0) continue;  // normalized representative
      out.emplace_back(a, b, c);
    }
  }
  return out;
}

CuspForm theta_imaginary_quadratic(long D, const std::map<std::tuple<long, long, long>, Turn>& psi,
                                   long horizon) {
  if (D <= 0 || D % 2 == 0 || !is_fundamental_discriminant(-D))
    throw std::invalid_argument("theta_imaginary_quadratic: -D must be an odd fundamental discriminant");
  auto forms = reduced_forms(D);
  if (!psi.empty()) {
    if (psi.size() != forms.size())
      throw std::invalid_argument("theta_imaginary_quadratic: class data does not match the class number");
    for (const auto& f : forms)
      if (psi.find(f) == psi.end())
        throw std::invalid_argument("theta_imaginary_quadratic: class data missing a reduced form");
  }
  long units = D == 3 ? 6 : 2;
  std::vector<Cplx> counts(horizon + 1);
  for (const auto& f : forms) {
    auto [a, bq, c] = f;
    Cplx w = psi.empty() ? Cplx(1L) : Cplx::unit(psi.at(f));
    std::vector<long> reps(horizon + 1, 0);
    long ymax = static_cast<long>(std::sqrt(4.0 * a * horizon / D)) + 1;
    for (long y = -ymax; y <= ymax; ++y) {
      // a x^2 + b x y + c y^2 <= H  <=>  (2a x + b y)^2 <= 4aH - D y^2
      double disc = 4.0 * a * horizon - static_cast<double>(D) * y * y;
      if (disc < 0) continue;
      double root = std::sqrt(disc);
      long xlo = static_cast<long>(std::floor((-static_cast<double>(bq) * y - root) / (2 * a))) - 1;
      long xhi = static_cast<long>(std::ceil((-static_cast<double>(bq) * y + root) / (2 * a))) + 1;
      for (long x = xlo; x <= xhi; ++x) {
        long n = a * x * x + bq * x * y + c * y * y;
        if (n >= 1 && n <= horizon) ++reps[n];
      }
    }
    for (long n = 1; n <= horizon; ++n)
      if (reps[n]) counts[n] += w * Real(reps[n]);
  }
  for (long n = 1; n <= horizon; ++n) counts[n] = counts[n] / Real(units);
  return CuspForm(1, D, DirichletCharacter::kronecker_character(-D), std::move(counts), true, true);
}

long elliptic_ap(const std::array<long, 5>& ainv, long D, long p) {
  auto mod = [p](long v) { return ((v % p) + p) % p; };
  long a1 = mod(ainv[0]), a2 = mod(ainv[1]), a3 = mod(ainv[2]), a4 = mod(ainv[3]), a6 = mod(ainv[4]);
  bool bad = D % p == 0;
  if (p <= 3 || bad) {
    // Exhaustive count of affine points on the Weierstrass equation.
    long count = 0;
    for (long x = 0; x < p; ++x) {
      long x2 = x * x % p;
      long rhs = mod(x2 * x % p + a2 * x2 % p + a4 * x % p + a6);
      for (long y = 0; y < p; ++y)
        if (mod(y * y % p + a1 * x % p * y % p + a3 * y % p - rhs) == 0) ++count;
    }
    // Good p: #E = count + 1 and a_p = p + 1 - #E.  Bad (multiplicative) p:
    // the singular point is among the affine count and a_p = p - count.
    return p - count;
  }
  // Odd good p: a_p = -sum_x kronecker(4x^3 + b2 x^2 + 2 b4 x + b6, p).
  long b2 = mod(a1 * a1 + 4 * a2);
  long b4 = mod(2 * a4 + a1 * a3);
  long b6 = mod(a3 * a3 + 4 * a6);
  long s = 0;
  for (long x = 0; x < p; ++x) {
    long x2 = x * x % p;
    long g = mod(4 * x2 % p * x % p + b2 * x2 % p + 2 * b4 * x % p + b6);
    s += kronecker(g, p);
  }
  return -s;
}

CuspForm elliptic_ap_form(const std::array<long, 5>& ainv, long D, long horizon) {
  auto [a1, a2, a3, a4, a6] = ainv;
  if (D <= 0 || !is_squarefree(D))
    throw std::invalid_argument("elliptic_ap_form: conductor must be positive and squarefree");
  // Bad primes must all divide the stated conductor.
  long b2 = a1 * a1 + 4 * a2;
  long b4 = 2 * a4 + a1 * a3;
  long b6 = a3 * a3 + 4 * a6;
  long b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  mpz_class disc = -mpz_class(b2) * b2 * b8 - 8 * mpz_class(b4) * b4 * b4 -
                   27 * mpz_class(b6) * b6 + 9 * mpz_class(b2) * b4 * b6;
  if (disc == 0) throw std::invalid_argument("elliptic_ap_form: singular curve");
  mpz_class dd = abs(disc);
  for (long p = 2; p * p <= dd || dd > 1; ++p) {
    if (p > 1000000) break;  // conductor is caller-asserted; stop scanning huge cofactors
    if (dd % p != 0) continue;
    while (dd % p == 0) dd /= p;
    if (D % p != 0)
      throw std::invalid_argument("elliptic_ap_form: bad reduction at p = " + std::to_string(p) +
                                  " outside the stated conductor");
  }
  std::vector<long> a(horizon + 1, 0);
  a[1] = 1;
  for (long p = 2; p <= horizon; ++p) {
    const auto& f = factorize(p);
    if (f.size() == 1 && f[0].second == 1) {
      long ap = elliptic_ap(ainv, D, p);
      // prime powers by the Hecke recurrence (bad p: a_{p^r} = a_p^r)
      bool bad = D % p == 0;
      long prev = 1, cur = ap;
      for (long q = p; q <= horizon; q *= p) {
        a[q] = cur;
        long next = bad ? cur * ap : cur * ap - p * prev;
        prev = cur;
        cur = next;
        if (q > horizon / p) break;
      }
    }
  }
  // Multiplicativity across coprime prime powers.
  for (long n = 2; n <= horizon; ++n) {
    const auto& f = factorize(n);
    if (f.size() <= 1) continue;
    long v = 1;
    for (const auto& [p, e] : f) {
      long q = 1;
      for (int i = 0; i < e; ++i) q *= p;
      v *= a[q];
    }
    a[n] = v;
  }
  std::vector<Cplx> coeffs(horizon + 1);
  for (long n = 1; n <= horizon; ++n)
    coeffs[n] = Cplx(Real(a[n]) / sqrt(Real(n)));
  return CuspForm(2, D, DirichletCharacter::principal(D), std::move(coeffs), true, true);
}

}  // namespace rsm
