#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

// Exact arithmetic in F = F_q((pi)) and its unramified quadratic extension
// E = F_{q^2}((pi)), q an odd prime.  The residue extension is realized as
// F_q[delta] with delta^2 = nu a fixed nonresidue, so Galois conjugation is
// the coefficientwise Frobenius and sends a + b*delta to a - b*delta.
//
// Elements are either exact finite Laurent polynomials in pi or truncated
// windows: coefficients known on [val, prec), everything at exponent >= prec
// unknown.  Coefficients below val are zero by construction, and a nonempty
// window has a nonzero leading coefficient, so the valuation of a nonempty
// element is always exact.  A window may be empty (val == prec): the element
// is then only known to satisfy v >= prec, and any query that needs more is
// an insufficient_precision error, never a guess.

namespace kappa {

struct Res {
  int16_t a = 0;  // F_q part
  int16_t b = 0;  // delta part
  bool is_zero() const { return a == 0 && b == 0; }
  bool operator==(const Res&) const = default;
};

class insufficient_precision : public std::runtime_error {
 public:
  explicit insufficient_precision(uint8_t sources)
      : std::runtime_error("insufficient precision"), sources_(sources) {}
  // Bitmask naming which enumeration variables the unknown tail came from
  // (0 when the value was built from exact inputs only).
  uint8_t sources() const { return sources_; }

 private:
  uint8_t sources_;
};

// Three-valued outcome of an integrality query on a truncated element.
enum class Tri : uint8_t { False = 0, True = 1, Unknown = 2 };

struct FieldContext {
  int p;                  // odd prime q
  int nu;                 // quadratic nonresidue mod p
  int default_precision;  // digit budget for inv of exact non-monomials

  FieldContext(int p_, int nu_, int default_precision_ = 24);
  // nu auto-selected as the smallest nonresidue mod p.
  static FieldContext make(int p, int default_precision = 24);

  int add(int x, int y) const { int s = x + y; return s >= p ? s - p : s; }
  int sub(int x, int y) const { int s = x - y; return s < 0 ? s + p : s; }
  int mul(int x, int y) const { return int((int32_t)x * y % p); }
  int neg(int x) const { return x == 0 ? 0 : p - x; }
  int inv(int x) const;  // x != 0

  Res radd(Res x, Res y) const { return {int16_t(add(x.a, y.a)), int16_t(add(x.b, y.b))}; }
  Res rsub(Res x, Res y) const { return {int16_t(sub(x.a, y.a)), int16_t(sub(x.b, y.b))}; }
  Res rneg(Res x) const { return {int16_t(neg(x.a)), int16_t(neg(x.b))}; }
  Res rmul(Res x, Res y) const {
    // (a1 + b1 d)(a2 + b2 d) = a1 a2 + nu b1 b2 + (a1 b2 + a2 b1) d
    int a = add(mul(x.a, y.a), mul(nu, mul(x.b, y.b)));
    int b = add(mul(x.a, y.b), mul(x.b, y.a));
    return {int16_t(a), int16_t(b)};
  }
  Res rconj(Res x) const { return {x.a, int16_t(neg(x.b))}; }
  Res rinv(Res x) const;          // x != 0
  Res rhalf() const { return {int16_t((p + 1) / 2), 0}; }
  bool is_square(int x) const;    // Euler criterion

  bool operator==(const FieldContext& o) const {
    return p == o.p && nu == o.nu;
  }
};

class Elem {
 public:
  Elem() = default;

  // --- factories ---
  static Elem zero(const FieldContext& ctx);
  static Elem one(const FieldContext& ctx) { return from_int(ctx, 1); }
  static Elem from_int(const FieldContext& ctx, long n);   // image of n in F_q
  static Elem delta(const FieldContext& ctx);
  static Elem pi_pow(const FieldContext& ctx, long k);
  static Elem monomial(const FieldContext& ctx, Res c, long k);
  // Exact element with the given coefficients starting at exponent val.
  static Elem from_coeffs(const FieldContext& ctx, long val, std::vector<Res> cf);
  // Truncated element: digits known on [val, val + cf.size()), tail unknown,
  // attributed to the given source bits.  Used by the enumeration engine.
  static Elem window(const FieldContext& ctx, long val, std::vector<Res> cf,
                     uint8_t src);

  const FieldContext& ctx() const { return *ctx_; }
  bool is_exact() const { return exact_; }
  bool is_zero() const { return zero_; }
  uint8_t src() const { return src_; }

  // Exact valuation.  Throws insufficient_precision when only v >= prec is
  // known, std::domain_error on the exact zero.
  long valuation() const;
  // nullopt for the exact zero; otherwise as valuation().
  std::optional<long> valuation_opt() const;
  // v >= prec lower bound that is always available (the valuation itself
  // when known).
  long valuation_lower_bound() const;

  // Decides v(x) >= k three-valuedly; never throws.
  Tri valuation_at_least(long k) const;
  // Decides v(x) >= 0, throwing insufficient_precision instead of guessing.
  bool is_integral() const;

  bool is_in_F() const;       // all known coefficients have zero delta part
  bool is_in_Fdelta() const;  // all known coefficients are pure delta

  Res coeff(long k) const;    // known coefficient at exponent k (throws past prec)
  long known_until() const;   // exponent bound of known coefficients (prec)

  Elem operator+(const Elem& o) const;
  Elem operator-(const Elem& o) const;
  Elem operator*(const Elem& o) const;
  Elem operator-() const;
  bool operator==(const Elem& o) const;  // exact elements only

  Elem conj() const;
  Elem norm() const;                  // x * conj(x), lands in F
  Elem inv() const;                   // see class comment for precision rules
  Elem shift(long k) const;           // multiply by pi^k
  Elem scale(Res c) const;            // multiply by an exact residue constant
  Elem truncated(long new_prec) const;  // forget coefficients at >= new_prec
  // Same value under another context with equal (p, nu); used to rerun a
  // computation under a larger inversion digit budget.
  Elem rebase(const FieldContext& ctx2) const;

  std::string to_string() const;

 private:
  const FieldContext* ctx_ = nullptr;
  bool exact_ = false;
  bool zero_ = false;
  long val_ = 0;
  long prec_ = 0;           // meaningful only when !exact_
  uint8_t src_ = 0;
  std::vector<Res> cf_;     // exact: full support from val_; window: [val_, prec_)

  Res at(long e) const;     // coefficient at exponent e assuming it is known
  void normalize();         // restore leading-nonzero / empty-window invariants
  friend class ElemOps;
};

// Prop-style integrality split: with a, b in F and x in Fdelta, integrality
// of ax + b forces integrality of ax and of b separately.  Returns the
// implication's truth value for the given triple (so: must always be true).
bool check_residue_split(const Elem& a, const Elem& b, const Elem& x);

enum class Subfield { E, F, Fdelta };

struct UnitClass {
  Elem rep;         // exact representative, valuation 0
  mpq_class mass;   // Haar mass of the class inside the unit group (total 1)
};

// Representatives of the unit classes modulo pi^K: (q^2-1)q^{2(K-1)} classes
// for E, (q-1)q^{K-1} for F and for Fdelta.
std::vector<UnitClass> enumerate_units(const FieldContext& ctx, int K,
                                       Subfield sub);

}  // namespace kappa
