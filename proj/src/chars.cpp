#include "rsm/chars.hpp"

#include <cstdlib>
#include <mutex>
#include <sstream>

namespace rsm {

namespace {

long primitive_root_mod_p(long p) {
  if (p == 2) return 1;
  long phi = p - 1;
  std::vector<long> prime_factors;
  for (const auto& [q, e] : factorize(phi)) { (void)e; prime_factors.push_back(q); }
  for (long g = 2; g < p; ++g) {
    bool ok = true;
    for (long q : prime_factors)
      if (powmod(g, phi / q, p) == 1) { ok = false; break; }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

// Extended gcd: returns g and writes x with a*x ≡ g (mod b).
long inv_mod(long a, long m) {
  long r0 = m, r1 = ((a % m) + m) % m, x0 = 0, x1 = 1;
  while (r1 != 0) {
    long q = r0 / r1;
    r0 -= q * r1; std::swap(r0, r1);
    x0 -= q * x1; std::swap(x0, x1);
  }
  if (r0 != 1) throw std::invalid_argument("inv_mod: not invertible");
  return ((x0 % m) + m) % m;
}

// CRT lift: the unit x mod m with x ≡ g (mod pe) and x ≡ 1 (mod m/pe),
// for pe || m.
long crt_unit_lift(long g, long pe, long m) {
  long other = m / pe;
  if (other == 1) return ((g % pe) + pe) % pe;
  long x1 = (g % pe) * other % m * inv_mod(other % pe, pe) % m;
  long x2 = pe * inv_mod(pe % other, other) % m;
  return (x1 + x2) % m;
}

}  // namespace

UnitComponentPtr unit_component(long p, int e) {
  static std::map<long, UnitComponentPtr> cache;
  static std::mutex mu;
  long pe = 1;
  for (int i = 0; i < e; ++i) pe *= p;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(pe);
  if (it != cache.end()) return it->second;

  auto c = std::make_shared<UnitComponent>();
  c->p = p;
  c->e = e;
  c->pe = pe;
  c->dlog.assign(pe, {-1, -1});
  if (p == 2 && e == 1) {
    c->ngen = 0;
    c->dlog[1 % pe] = {0, 0};
  } else if (p == 2 && e == 2) {
    c->ngen = 1;
    c->gen[0] = 3;
    c->ord[0] = 2;
    c->dlog[1] = {0, 0};
    c->dlog[3] = {1, 0};
  } else if (p == 2) {  // e >= 3: <-1> x <5>
    c->ngen = 2;
    c->gen[0] = pe - 1;
    c->ord[0] = 2;
    c->gen[1] = 5;
    c->ord[1] = pe / 4;
    long a = 1;
    for (long j = 0; j < c->ord[1]; ++j) {
      c->dlog[a] = {0, j};
      c->dlog[pe - a] = {1, j};
      a = a * 5 % pe;
    }
  } else {
    c->ngen = 1;
    long g = primitive_root_mod_p(p);
    if (e >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
    c->gen[0] = g % pe;
    c->ord[0] = pe / p * (p - 1);
    long a = 1;
    for (long j = 0; j < c->ord[0]; ++j) {
      c->dlog[a] = {j, 0};
      a = static_cast<long>(static_cast<unsigned long long>(a) * c->gen[0] % pe);
    }
  }
  cache.emplace(pe, c);
  return c;
}

void DirichletCharacter::init_structure(long m) {
  if (m <= 0) throw std::invalid_argument("character modulus must be positive");
  if (m > 10000000L) throw std::invalid_argument("character modulus beyond supported scale");
  modulus_ = m;
  comps_.clear();
  chi_exp_.clear();
  for (const auto& [p, e] : factorize(m) ) {
    comps_.push_back(unit_component(p, e));
    chi_exp_.push_back({0, 0});
  }
  if (m == 1) return;
}

DirichletCharacter DirichletCharacter::principal(long m) {
  DirichletCharacter chi;
  chi.init_structure(m);
  return chi;
}

Turn DirichletCharacter::unit_value(long a) const {
  Turn t{0, 1};
  for (size_t i = 0; i < comps_.size(); ++i) {
    const auto& c = *comps_[i];
    const auto& d = c.dlog[a % c.pe];
    if (d[0] < 0) throw std::logic_error("unit_value on a non-unit");
    for (int j = 0; j < c.ngen; ++j)
      if (chi_exp_[i][j] != 0)
        t = t.plus(Turn::make(chi_exp_[i][j] * d[j], c.ord[j]));
  }
  return t;
}

std::optional<Turn> DirichletCharacter::value(long a) const {
  long r = ((a % modulus_) + modulus_) % modulus_;
  if (modulus_ == 1) return Turn{0, 1};
  if (std::gcd(r, modulus_) != 1) return std::nullopt;
  return unit_value(r);
}

Cplx DirichletCharacter::eval(long a) const {
  auto t = value(a);
  return t ? Cplx::unit(*t) : Cplx(0L);
}

Cplx DirichletCharacter::eval0(long a) const { return eval(a); }

bool DirichletCharacter::is_principal() const {
  for (const auto& ce : chi_exp_)
    if (ce[0] != 0 || ce[1] != 0) return false;
  return true;
}

int DirichletCharacter::parity() const {
  auto t = value(modulus_ - 1);
  if (!t) return 1;  // modulus 1 or 2
  if (t->is_one()) return 1;
  if (t->den == 2) return -1;
  throw std::logic_error("character value at -1 is not a sign");
}

DirichletCharacter DirichletCharacter::conj() const {
  DirichletCharacter chi(*this);
  for (size_t i = 0; i < comps_.size(); ++i)
    for (int j = 0; j < comps_[i]->ngen; ++j)
      if (chi.chi_exp_[i][j] != 0)
        chi.chi_exp_[i][j] = comps_[i]->ord[j] - chi.chi_exp_[i][j];
  return chi;
}

long DirichletCharacter::conductor() const {
  long cond = 1;
  for (size_t i = 0; i < comps_.size(); ++i) {
    const auto& c = *comps_[i];
    if (c.p != 2) {
      long e0 = chi_exp_[i][0];
      if (e0 == 0) continue;
      long order = c.ord[0] / std::gcd(e0, c.ord[0]);
      // smallest f >= 1 with order | phi(p^f) = p^{f-1}(p-1)
      long f = 1, phif = c.p - 1;
      while (phif % order != 0) { ++f; phif *= c.p; }
      long pf = 1;
      for (long k = 0; k < f; ++k) pf *= c.p;
      cond *= pf;
    } else {
      if (c.ngen == 0) continue;
      if (c.ngen == 1) {  // modulus 4
        if (chi_exp_[i][0] != 0) cond *= 4;
        continue;
      }
      long e5 = chi_exp_[i][1];
      long order5 = e5 == 0 ? 1 : c.ord[1] / std::gcd(e5, c.ord[1]);
      if (order5 > 1) {
        cond *= 4 * order5;
      } else if (chi_exp_[i][0] != 0) {
        cond *= 4;
      }
    }
  }
  return cond;
}

namespace {
// Smallest lift a ≡ g (mod q) with gcd(a, m) = 1; exists whenever g is a
// unit mod q and every prime of m dividing neither q nor g is avoidable.
long coprime_lift(long g, long q, long m) {
  for (long a = g == 0 ? q : g; ; a += q)
    if (std::gcd(a, m) == 1) return a;
}
}  // namespace

DirichletCharacter DirichletCharacter::primitive_inducing() const {
  long c = conductor();
  DirichletCharacter xi;
  xi.init_structure(c);
  for (size_t i = 0; i < xi.comps_.size(); ++i) {
    const auto& comp = *xi.comps_[i];
    for (int j = 0; j < comp.ngen; ++j) {
      long lift = crt_unit_lift(comp.gen[j], comp.pe, c);
      long a = coprime_lift(lift, c, modulus_);
      Turn t = unit_value(a % modulus_);
      if (comp.ord[j] % t.den != 0)
        throw std::logic_error("induced character value has incompatible order");
      xi.chi_exp_[i][j] = t.num * (comp.ord[j] / t.den) % comp.ord[j];
    }
  }
  return xi;
}

std::pair<DirichletCharacter, DirichletCharacter>
DirichletCharacter::factor(long m1, long m2) const {
  if (m1 <= 0 || m2 <= 0 || m1 * m2 != modulus_ || std::gcd(m1, m2) != 1)
    throw std::invalid_argument("factor: need a coprime splitting of the modulus");
  DirichletCharacter a, b;
  a.init_structure(m1);
  b.init_structure(m2);
  size_t ia = 0, ib = 0;
  for (size_t i = 0; i < comps_.size(); ++i) {
    if (m1 % comps_[i]->p == 0) {
      a.chi_exp_[ia++] = chi_exp_[i];
    } else {
      b.chi_exp_[ib++] = chi_exp_[i];
    }
  }
  return {a, b};
}

DirichletCharacter product(const DirichletCharacter& x, const DirichletCharacter& y) {
  long l = std::lcm(x.modulus_, y.modulus_);
  DirichletCharacter r;
  r.init_structure(l);
  for (size_t i = 0; i < r.comps_.size(); ++i) {
    const auto& comp = *r.comps_[i];
    for (int j = 0; j < comp.ngen; ++j) {
      long lift = crt_unit_lift(comp.gen[j], comp.pe, l);
      auto tx = x.value(lift), ty = y.value(lift);
      if (!tx || !ty) throw std::logic_error("product: lift not a unit");
      Turn t = tx->plus(*ty);
      if (comp.ord[j] % t.den != 0)
        throw std::logic_error("product value has incompatible order");
      r.chi_exp_[i][j] = t.num * (comp.ord[j] / t.den) % comp.ord[j];
    }
  }
  return r;
}

bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
  return a.modulus_ == b.modulus_ && a.chi_exp_ == b.chi_exp_;
}

DirichletCharacter DirichletCharacter::kronecker_character(long d) {
  if (!is_fundamental_discriminant(d))
    throw std::invalid_argument("kronecker_character: not a fundamental discriminant");
  long m = d < 0 ? -d : d;
  DirichletCharacter chi;
  chi.init_structure(m);
  for (size_t i = 0; i < chi.comps_.size(); ++i) {
    const auto& comp = *chi.comps_[i];
    for (int j = 0; j < comp.ngen; ++j) {
      long lift = crt_unit_lift(comp.gen[j], comp.pe, m);
      int v = kronecker(d, lift);
      if (v == 1) {
        chi.chi_exp_[i][j] = 0;
      } else if (v == -1) {
        if (comp.ord[j] % 2 != 0)
          throw std::logic_error("kronecker character inconsistent with unit group");
        chi.chi_exp_[i][j] = comp.ord[j] / 2;
      } else {
        throw std::logic_error("kronecker symbol vanished on a unit");
      }
    }
  }
  return chi;
}

DirichletCharacter DirichletCharacter::from_values(
    long m, const std::vector<std::pair<long, Turn>>& values) {
  DirichletCharacter base;
  base.init_structure(m);
  long total = 1;
  std::vector<std::pair<size_t, int>> slots;
  for (size_t i = 0; i < base.comps_.size(); ++i)
    for (int j = 0; j < base.comps_[i]->ngen; ++j) {
      total *= base.comps_[i]->ord[j];
      slots.emplace_back(i, j);
      if (total > 2000000L)
        throw std::invalid_argument("from_values: unit group too large to search");
    }
  for (const auto& [u, t] : values) {
    (void)t;
    if (std::gcd(((u % m) + m) % m, m) != 1 && m != 1)
      throw std::invalid_argument("from_values: constraint unit not coprime to modulus");
  }
  std::optional<DirichletCharacter> found;
  std::vector<long> odo(slots.size(), 0);
  for (long idx = 0; idx < total; ++idx) {
    DirichletCharacter cand = base;
    for (size_t s = 0; s < slots.size(); ++s)
      cand.chi_exp_[slots[s].first][slots[s].second] = odo[s];
    bool ok = true;
    for (const auto& [u, t] : values)
      if (*cand.value(u) != t) { ok = false; break; }
    if (ok) {
      if (found) throw std::invalid_argument("from_values: constraints are ambiguous");
      found = cand;
    }
    for (size_t s = 0; s < slots.size(); ++s) {
      if (++odo[s] < base.comps_[slots[s].first]->ord[slots[s].second]) break;
      odo[s] = 0;
    }
  }
  if (!found) throw std::invalid_argument("from_values: no character matches the constraints");
  return *found;
}

std::string DirichletCharacter::serialize() const {
  if (is_principal()) return "principal(" + std::to_string(modulus_) + ")";
  // Prefer the quadratic-symbol sugar when it is exactly this character.
  if (is_primitive()) {
    long d = parity() < 0 ? -modulus_ : modulus_;
    if (is_fundamental_discriminant(d)) {
      try {
        if (kronecker_character(d) == *this) return "kronecker(" + std::to_string(d) + ")";
      } catch (const std::exception&) {
      }
    }
  }
  std::ostringstream os;
  os << "mod(" << modulus_;
  for (size_t i = 0; i < comps_.size(); ++i) {
    const auto& comp = *comps_[i];
    for (int j = 0; j < comp.ngen; ++j) {
      long lift = crt_unit_lift(comp.gen[j], comp.pe, modulus_);
      Turn t = Turn::make(chi_exp_[i][j], comp.ord[j]);
      os << "; " << lift << "=" << t.num << "/" << t.den;
    }
  }
  os << ")";
  return os.str();
}

namespace {
std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}
}  // namespace

DirichletCharacter DirichletCharacter::parse(const std::string& spec0) {
  std::string spec = strip(spec0);
  auto inner = [&](const std::string& head) -> std::optional<std::string> {
    if (spec.rfind(head + "(", 0) == 0 && spec.back() == ')')
      return spec.substr(head.size() + 1, spec.size() - head.size() - 2);
    return std::nullopt;
  };
  if (auto s = inner("principal")) return principal(std::stol(*s));
  if (auto s = inner("trivial")) return principal(std::stol(*s));
  if (auto s = inner("kronecker")) return kronecker_character(std::stol(*s));
  if (auto s = inner("mod")) {
    std::vector<std::string> parts;
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ';')) parts.push_back(strip(item));
    if (parts.empty()) throw std::invalid_argument("character spec: empty mod(...)");
    long m = std::stol(parts[0]);
    std::vector<std::pair<long, Turn>> values;
    for (size_t i = 1; i < parts.size(); ++i) {
      auto eq = parts[i].find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("character spec: expected u=num/den in " + parts[i]);
      long u = std::stol(strip(parts[i].substr(0, eq)));
      std::string frac = strip(parts[i].substr(eq + 1));
      auto slash = frac.find('/');
      long num = std::stol(slash == std::string::npos ? frac : frac.substr(0, slash));
      long den = slash == std::string::npos ? 1 : std::stol(frac.substr(slash + 1));
      values.emplace_back(u, Turn::make(num, den));
    }
    return from_values(m, values);
  }
  throw std::invalid_argument("unrecognized character spec: " + spec);
}

Cplx gauss_sum(const DirichletCharacter& xi) {
  long q = xi.modulus();
  if (q == 1) return Cplx(1L);
  if (!xi.is_primitive())
    throw std::invalid_argument("gauss_sum: character must be primitive");
  Cplx total(0L);
  for (long a = 1; a < q; ++a) {
    auto t = xi.value(a);
    if (!t) continue;
    total += Cplx::unit(t->plus(Turn::make(a, q)));
  }
  return total;
}

}  // namespace rsm
