#pragma once
// Dirichlet characters with exact root-of-unity values.  A character mod m is
// stored through its images on fixed generators of each prime-power component
// of (Z/m)^*, with the usual two-generator convention at 2^e, e >= 3.  Values
// are exact turns (rational multiples of a full rotation); conversion to
// floating complex happens only at the numeric boundary.

#include "rsm/complexv.hpp"
#include "rsm/factor.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rsm {

// Structure of one component (Z/p^e)^*: generators, orders, and a discrete
// logarithm table.  Character-independent, shared between characters.
struct UnitComponent {
  long p = 0;
  int e = 0;
  long pe = 1;
  int ngen = 0;                      // 0 (trivial group), 1, or 2
  std::array<long, 2> gen{1, 1};
  std::array<long, 2> ord{1, 1};
  // dlog[a] = exponents (j0, j1) with a = gen0^j0 * gen1^j1 mod pe,
  // or (-1, -1) when a is not a unit.
  std::vector<std::array<long, 2>> dlog;
};

using UnitComponentPtr = std::shared_ptr<const UnitComponent>;

// Cached component structure for p^e.
UnitComponentPtr unit_component(long p, int e);

class DirichletCharacter {
public:
  // Principal character mod m.
  static DirichletCharacter principal(long m);
  // Quadratic character (d | .) of a fundamental discriminant d.
  static DirichletCharacter kronecker_character(long d);
  // The unique character mod m taking the prescribed turn values on the given
  // units; throws if none or more than one character matches.
  static DirichletCharacter from_values(long m, const std::vector<std::pair<long, Turn>>& values);
  // Parse "principal(m)", "kronecker(d)", or "mod(m; u1=n1/d1; u2=n2/d2; ...)".
  static DirichletCharacter parse(const std::string& spec);

  long modulus() const { return modulus_; }
  bool is_principal() const;
  // chi(-1) as +1 / -1.
  int parity() const;

  // Exact value as a turn; nullopt encodes the value 0 (a not coprime to m).
  std::optional<Turn> value(long a) const;
  Cplx eval(long a) const;
  // Character value at arbitrary integers with the zero-argument convention
  // chi(0) = 1 when m = 1 and 0 otherwise.
  Cplx eval0(long a) const;

  DirichletCharacter conj() const;
  long conductor() const;
  bool is_primitive() const { return conductor() == modulus_; }
  // The primitive character of modulus conductor() inducing this one.
  DirichletCharacter primitive_inducing() const;
  // Restriction to a coprime splitting m = m1 * m2; returns (chi_m1, chi_m2).
  std::pair<DirichletCharacter, DirichletCharacter> factor(long m1, long m2) const;

  std::string serialize() const;

  friend DirichletCharacter product(const DirichletCharacter& a, const DirichletCharacter& b);
  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b);

private:
  DirichletCharacter() = default;
  void init_structure(long m);
  // Turn value on a unit a (gcd(a, m) = 1 assumed).
  Turn unit_value(long a) const;

  long modulus_ = 1;
  std::vector<UnitComponentPtr> comps_;       // ascending prime
  std::vector<std::array<long, 2>> chi_exp_;  // image exponents per component/generator
};

// Gauss sum tau(xi) = sum_{a mod q} xi(a) e^{2 pi i a / q} of a primitive
// character; tau(trivial) = 1.  Non-primitive input is rejected.
Cplx gauss_sum(const DirichletCharacter& xi);

}  // namespace rsm
