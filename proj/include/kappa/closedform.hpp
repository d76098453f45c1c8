#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "kappa/measure.hpp"

// Closed-form side of the verification: the per-case counting formulas as
// exact Laurent polynomials in q, the differences they assemble into, and
// the predicted final value the brute-force masses are compared against.
//
// Each formula id names one slice of the oracle's case decomposition:
//
//   posOne    (1,0) all-summands   h = V_m              v(c) >= 0
//   posTwo    (1,0) all-summands   h = V_m              v(c) <  0
//   posThree  (1,0) all-summands   -V_m <= h <= V_m-1   v(c) >= 0
//   posFour   (1,0) all-summands   -V_m <= h <= V_m-1   v(c) <  0
//   negOne    (0,1) all-summands   h = -V_m-1           v(d) >= 0
//   negTwo    (0,1) all-summands   h = -V_m-1           v(d) <  0
//   negThree  (0,1) all-summands   -V_m <= h <= V_m-1   v(d) >= 0
//   negFour   (0,1) all-summands   -V_m <= h <= V_m-1   v(d) <  0
//   posFive   (1,0) E6-only        -V_m   <= h <= V_m
//   negFive   (0,1) E6-only        -V_m-1 <= h <= V_m-1
//
// plus the three assembled differences: the extreme column, the interior
// v >= 0 column and the interior v < 0 column, whose sum gathers into
// (-1)^(V_m+V_p) q^(2 V_m).

namespace kappa {

// Element of Z[q, q^-1] divided by a power of (q+1), kept normalized so the
// numerator carries no factor of q+1.  All arithmetic is exact; numbers
// appear only when eval substitutes a concrete q.
class LaurentPolyQ {
 public:
  LaurentPolyQ() = default;  // zero
  LaurentPolyQ(long n);      // constant
  static LaurentPolyQ monomial(long coeff, long exp);

  LaurentPolyQ operator+(const LaurentPolyQ& o) const;
  LaurentPolyQ operator-(const LaurentPolyQ& o) const;
  LaurentPolyQ operator*(const LaurentPolyQ& o) const;
  LaurentPolyQ operator-() const;
  // Division by q+1, exact when possible, otherwise tracked in the
  // denominator until later factors cancel it.
  LaurentPolyQ over_q_plus_one() const;

  bool operator==(const LaurentPolyQ& o) const;
  bool is_zero() const { return num_.empty(); }

  ExactMeasure eval(long q) const;
  std::string str() const;

 private:
  std::map<long, mpz_class> num_;  // exponent -> coefficient
  long den_pow_ = 0;               // denominator (q+1)^den_pow_
  void normalize();
};

std::ostream& operator<<(std::ostream& os, const LaurentPolyQ& p);

// |{x in Z : a >= 2x >= b}|, i.e. the number of even integers in [b, a];
// 0 when the range is empty.
long count_even_between(long a, long b);

enum class CaseFormulaId {
  posOne,
  posTwo,
  posThree,
  posFour,
  negOne,
  negTwo,
  negThree,
  negFour,
  posFive,
  negFive,
  extreme,
  case1_diff,
  case2_diff,
};

// The display named by id, as an exact Laurent polynomial.  h must lie in
// the regime tabulated above and must be absent for the h-independent ids
// (the two extreme-column pairs accept their own h as a convenience).
// Requires 0 <= V_m < V_p.
LaurentPolyQ case_formula(CaseFormulaId id, std::optional<long> h, long V_m,
                          long V_p);

// The oracle slice a display id is compared against: side, summand class,
// sub-case filter and the admissible h range (empty when h_hi < h_lo, which
// happens for the interior displays at V_m = 0).  Only the ten per-case
// display ids have a slice; the assembled differences do not.
struct CaseSlice {
  Side side;
  SummandClass cls;
  CSplit split;
  long h_lo, h_hi;
};
CaseSlice case_slice(CaseFormulaId id, long V_m);

const char* case_formula_name(CaseFormulaId id);

enum class AssembledPart { extreme, interior_case1, interior_case2 };

// The three case differences after summing over h:
//   extreme:        (-1)^(V_m+V_p) (1 + (q^(2V_m) - 1) q/(q+1))
//   interior_case1: (-1)^(V_m+V_p) (q^(2V_m) - 1) q/(q+1)
//   interior_case2: (-1)^(V_m+V_p) (q^(2V_m) - 1) (1-q)/(1+q)
// The sign is carried by all three parts alike; dropping it from the third
// would break the gathering identity that their sum telescopes to
// (-1)^(V_m+V_p) q^(2V_m).
LaurentPolyQ assembled_difference(AssembledPart part, long V_m, long V_p);

// The predicted value (-1)^(V_m+V_p) q^(2V_m).  Refuses V_p <= V_m or
// V_m < 0: no closed form is claimed there.
ExactMeasure kappa_orbital_closed(long V_m, long V_p, long q);

// Mass of the integral locus through the matching point
// diag(x,-x) x diag(y,-y) of the compact torus pair: 1 when both
// coordinates are integral, 0 otherwise.
ExactMeasure endoscopic_stable_orbital(const Elem& x, const Elem& y);

// Proportionality constant between the signed two-class difference and the
// stable mass above: (-1)^(V_m+V_p) q^(2V_m).  discriminant_power is its
// exponent 2 V_m, read off the two relevant roots, each with a
// two-dimensional root space contributing v(x-y) twice.
ExactMeasure transfer_factor(const GammaParams& g);
long discriminant_power(const GammaParams& g);

}  // namespace kappa
