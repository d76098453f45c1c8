#pragma once

#include "kappa/localfield.hpp"
#include "kappa/unitary.hpp"

// Integrality condition system for the conjugated orbit representative.
//
// Conjugating gamma = diag(x, y, -y, -x) by m(r1, r2) u(c, d) and asking the
// result to be integral produces, after mixing the six matrix coordinates with
// the unimodular integer matrix coord_mix, seven expressions E1..E7 whose
// simultaneous integrality is equivalent to the matrix condition.  Only the
// quantities s = r2/r1 and n = N(r1) enter, so orbits are enumerated over the
// reduced pair (s, n) instead of (r1, r2); that collapses a two-dimensional
// unit torus to the part the conditions can see.
//
// E1 = s(x+y)           E2 = E1 c        E3 = E1 d
// E4 = (x-y)/(n sbar)   E5 = (x-y) n s
// E6 = 4 s c d (x+y) + (x+y)/sbar
// E7 = (x-y)(c n s + d/(n sbar))
//
// The stc variant substitutes n -> pi n inside E4, E5, E7 only; it is the
// condition system for the representative of the other pure inner twist.

namespace kappa {

enum class Variant : uint8_t { plain, stc };

struct ReducedCoords {
  Elem s;       // r2/r1, nonzero in E
  Elem n;       // N(r1), nonzero in F with even valuation
  long v_s = 0;
  long v_n = 0;
  long h = 0;   // v_s + v_n = v(r1) + v(r2)
};

// Reduce a Levi point to the coordinates the conditions depend on.
// r1, r2 must be nonzero with decidable valuation.
ReducedCoords reduce(const Elem& r1, const Elem& r2);

// Build ReducedCoords directly; this is the enumeration entry point.
// s must be nonzero in E, n nonzero in F with even valuation.
ReducedCoords make_reduced(const Elem& s, const Elem& n);

struct ConditionVector {
  Elem E1, E2, E3, E4, E5;
  Elem E6_sum, E6_term1, E6_term2;
  Elem E7_sum, E7_term1, E7_term2;
  Variant variant = Variant::plain;
};

// Evaluates the condition system at (c, d, s, n).  c, d must lie in Fdelta.
// Divisions are honest: with window inputs the results carry the precision
// that survives, and insufficient_precision propagates out rather than being
// resolved by guesswork.
ConditionVector compute_E(const Elem& c, const Elem& d, const ReducedCoords& rc,
                          const GammaParams& gamma, Variant variant);

// Case classification of a point where every sum E1..E7 is integral:
//   AllSummands   all four E6/E7 summands integral as well
//   E6Only        E6 summands integral, E7 summands not (leading cancellation)
//   MixedSummands E6 summands not integral; possible only outside the nearly
//                 singular range, where the elimination lemmas do not apply
// NotIntegral covers everything else.
enum class CaseClass : uint8_t { AllSummands, E6Only, MixedSummands, NotIntegral };

struct IntegralityProfile {
  bool e[7] = {};  // E1..E5, E6_sum, E7_sum
  bool e6_t1 = false, e6_t2 = false;
  bool e7_t1 = false, e7_t2 = false;
  CaseClass cls = CaseClass::NotIntegral;
  bool all_integral() const { return cls != CaseClass::NotIntegral; }
};

IntegralityProfile profile(const ConditionVector& cv);

}  // namespace kappa
