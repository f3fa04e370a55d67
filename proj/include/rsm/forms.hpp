#pragma once
// Cusp form coefficient providers: file ingestion, the discriminant form
// Delta = eta^24, imaginary-quadratic theta series from reduced binary
// quadratic forms, elliptic-curve eigenforms by point counting, and
// cusp expansions b_n^delta via the Atkin-Li rules.

#include "rsm/chars.hpp"
#include "rsm/special.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rsm {

// A coefficient was requested beyond the data horizon of its provider.
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A cusp form of weight l and squarefree level D with nebentypus mod D,
// holding analytically normalized coefficients b_n (the q^n coefficient of
// the form is b_n n^{(l-1)/2}) up to an explicit horizon.
class CuspForm {
public:
  CuspForm(long weight, long level, DirichletCharacter eps, std::vector<Cplx> coeffs,
           bool is_newform, bool is_eigenform);

  long weight() const { return weight_; }
  long level() const { return level_; }
  const DirichletCharacter& nebentypus() const { return eps_; }
  bool is_newform() const { return is_newform_; }
  bool is_eigenform() const { return is_eigenform_; }
  // Largest n for which b_n is available.
  long horizon() const { return static_cast<long>(coeffs_.size()) - 1; }
  Cplx b1() const { return b(1); }

  // b_n; throws InsufficientData past the horizon.
  Cplx b(long n) const;

  // Coefficient at the cusp indexed by delta | D.  delta = 1 is the form
  // itself; delta = D uses the Atkin-Li closed forms (primitive nebentypus
  // newform, or trivial nebentypus eigenform); intermediate cusps require
  // user-supplied data.
  Cplx b_cusp(long delta, long n) const;

  // Largest n for which b_cusp(delta, n) can be served.
  long cusp_horizon(long delta) const;

  // Attach externally supplied coefficients for one cusp (overrides the
  // closed forms for that delta).
  void set_cusp_data(long delta, std::vector<Cplx> coeffs);

private:
  long weight_, level_;
  DirichletCharacter eps_;
  std::vector<Cplx> coeffs_;  // [n] = b_n, index 0 unused
  bool is_newform_, is_eigenform_;
  std::map<long, std::vector<Cplx>> cusp_data_;
};

// Parse a coefficient file: header lines "weight=", "level=",
// "nebentypus=<character-spec>", "normalization=raw|analytic", then
// coefficient lines "n re [im]" with decimal or exact-rational ("p/q")
// entries.  Raw entries are the q^n coefficients; analytic entries are b_n.
CuspForm load_coefficients(const std::string& path);

// The modular discriminant, weight 12 and level 1: coefficients
// tau(n)/n^{11/2}, generated from the eta-product expansion.
CuspForm delta_form(long horizon);

// Weight-1 theta series of level D and nebentypus kronecker(-D) attached to
// a class-group character, given as a map from reduced binary quadratic
// forms (a, b, c) of discriminant -D to exact turns.  An empty map means the
// trivial character.  -D must be an odd fundamental discriminant.
CuspForm theta_imaginary_quadratic(long D, const std::map<std::tuple<long, long, long>, Turn>& psi,
                                   long horizon);

// All reduced binary quadratic forms (a, b, c), a > 0, of discriminant -D.
std::vector<std::tuple<long, long, long>> reduced_forms(long D);

// Weight-2 trivial-nebentypus eigenform attached to an elliptic curve
// [a1, a2, a3, a4, a6] of squarefree conductor D: a_p by exhaustive point
// counting over F_p, extended by the Hecke recurrences; b_n = a_n / sqrt(n).
CuspForm elliptic_ap_form(const std::array<long, 5>& ainv, long D, long horizon);

// Trace of Frobenius a_p for one prime (exposed for point-count testing).
long elliptic_ap(const std::array<long, 5>& ainv, long D, long p);

}  // namespace rsm
