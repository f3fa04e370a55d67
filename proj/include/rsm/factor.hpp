#pragma once
// Elementary multiplicative number theory: factorization (trial division with
// a process-wide memo), Mobius, Euler phi, divisor lists, Kronecker symbols,
// and the q-smooth/coprime splits used throughout the moment formulas.
// All inputs are desk-scale (< 10^7); determinism matters more than speed.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rsm {

using Factorization = std::vector<std::pair<long, int>>;  // (prime, exponent), ascending

inline const Factorization& factorize(long n) {
  if (n <= 0) throw std::invalid_argument("factorize: argument must be positive");
  static std::map<long, Factorization> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Factorization f;
  long m = n;
  for (long p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p == 0) {
      int e = 0;
      while (m % p == 0) { m /= p; ++e; }
      f.emplace_back(p, e);
    }
  }
  if (m > 1) f.emplace_back(m, 1);
  return cache.emplace(n, std::move(f)).first->second;
}

inline int mobius(long n) {
  if (n <= 0) throw std::invalid_argument("mobius: argument must be positive");
  int sign = 1;
  for (const auto& [p, e] : factorize(n)) {
    (void)p;
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

inline long euler_phi(long n) {
  if (n <= 0) throw std::invalid_argument("euler_phi: argument must be positive");
  long r = n;
  for (const auto& [p, e] : factorize(n)) { (void)e; r -= r / p; }
  return r;
}

inline std::vector<long> divisors(long n) {
  if (n <= 0) throw std::invalid_argument("divisors: argument must be positive");
  std::vector<long> ds{1};
  for (const auto& [p, e] : factorize(n)) {
    size_t base = ds.size();
    long pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline long num_divisors(long n) {
  long t = 1;
  for (const auto& [p, e] : factorize(n)) { (void)p; t *= e + 1; }
  return t;
}

// Largest divisor of n supported on the primes of q ("q-smooth part").
inline long smooth_part(long n, long q) {
  if (n <= 0) throw std::invalid_argument("smooth_part: argument must be positive");
  if (q <= 0) throw std::invalid_argument("smooth_part: q must be positive");
  long s = 1;
  for (const auto& [p, e] : factorize(n)) {
    (void)e;
    if (q % p == 0) {
      long m = n;
      while (m % p == 0) { m /= p; s *= p; }
    }
  }
  return s;
}

// Largest divisor of n coprime to q.
inline long prime_to_q_part(long n, long q) { return n / smooth_part(n, q); }

// A = A1 * A2 with A1 > 0 supported on the primes of q and gcd(A2, q) = 1.
// A = 0 maps to (1, 0); the sign of A is carried by A2.
inline std::pair<long, long> split_relative(long A, long q) {
  if (A == 0) return {1, 0};
  long a = A < 0 ? -A : A;
  long a1 = smooth_part(a, q);
  return {a1, A / a1};
}

inline long powmod(long base, long exp, long mod) {
  if (mod <= 0) throw std::invalid_argument("powmod: modulus must be positive");
  unsigned long long r = 1 % static_cast<unsigned long long>(mod);
  unsigned long long b = static_cast<unsigned long long>(((base % mod) + mod) % mod);
  while (exp > 0) {
    if (exp & 1) r = r * b % static_cast<unsigned long long>(mod);
    b = b * b % static_cast<unsigned long long>(mod);
    exp >>= 1;
  }
  return static_cast<long>(r);
}

// Full Kronecker symbol (a | n), the natural extension of the Jacobi symbol
// to all integers n.
inline int kronecker(long a, long n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int two_count = 0;
  while (n % 2 == 0) { n /= 2; ++two_count; }
  if (two_count > 0) {
    if (a % 2 == 0) return 0;
    long am8 = ((a % 8) + 8) % 8;
    if ((two_count & 1) && (am8 == 3 || am8 == 5)) result = -result;
  }
  a = ((a % n) + n) % n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      long nm8 = n % 8;
      if (nm8 == 3 || nm8 == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

inline bool is_squarefree(long n) {
  for (const auto& [p, e] : factorize(n)) { (void)p; if (e > 1) return false; }
  return true;
}

// d is a fundamental discriminant: d = 1 is excluded; d ≡ 1 (mod 4) and
// squarefree, or d = 4m with m ≡ 2, 3 (mod 4) squarefree.
inline bool is_fundamental_discriminant(long d) {
  if (d == 0 || d == 1) return false;
  long r = ((d % 4) + 4) % 4;
  if (r == 1) return is_squarefree(d < 0 ? -d : d);
  if (r != 0) return false;
  long m = d / 4;
  long rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && is_squarefree(m < 0 ? -m : m);
}

}  // namespace rsm
