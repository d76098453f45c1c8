#include "kappa/conditions.hpp"

#include <stdexcept>

namespace kappa {

ReducedCoords reduce(const Elem& r1, const Elem& r2) {
  if (r1.is_zero() || r2.is_zero()) throw std::invalid_argument("reduce: zero coordinate");
  ReducedCoords rc;
  rc.s = r2 * r1.inv();
  rc.n = r1.norm();
  rc.v_s = r2.valuation() - r1.valuation();
  rc.v_n = 2 * r1.valuation();
  rc.h = rc.v_s + rc.v_n;
  return rc;
}

ReducedCoords make_reduced(const Elem& s, const Elem& n) {
  if (s.is_zero() || n.is_zero()) throw std::invalid_argument("make_reduced: zero coordinate");
  if (!n.is_in_F()) throw std::invalid_argument("make_reduced: n not in F");
  ReducedCoords rc;
  rc.s = s;
  rc.n = n;
  rc.v_s = s.valuation();
  rc.v_n = n.valuation();
  if (rc.v_n % 2 != 0) throw std::invalid_argument("make_reduced: v(n) odd");
  rc.h = rc.v_s + rc.v_n;
  return rc;
}

ConditionVector compute_E(const Elem& c, const Elem& d, const ReducedCoords& rc,
                          const GammaParams& gamma, Variant variant) {
  if (!c.is_in_Fdelta() || !d.is_in_Fdelta())
    throw std::invalid_argument("compute_E: c, d must lie in Fdelta");
  const FieldContext& ctx = rc.s.ctx();
  const Elem xpy = gamma.x + gamma.y;
  const Elem xmy = gamma.x - gamma.y;
  // The twisted representative differs from the plain one exactly by an extra
  // factor pi on n wherever n appears, i.e. in E4, E5, E7.
  const Elem m = variant == Variant::stc ? rc.n.shift(1) : rc.n;
  const Elem sbar = rc.s.conj();
  const Elem ns = m * rc.s;
  const Elem nsbar_inv = (m * sbar).inv();
  const Res four{int16_t(4 % ctx.p), 0};

  ConditionVector cv;
  cv.variant = variant;
  cv.E1 = rc.s * xpy;
  cv.E2 = cv.E1 * c;
  cv.E3 = cv.E1 * d;
  cv.E4 = xmy * nsbar_inv;
  cv.E5 = xmy * ns;
  cv.E6_term1 = (rc.s * c * d * xpy).scale(four);
  cv.E6_term2 = xpy * sbar.inv();
  cv.E6_sum = cv.E6_term1 + cv.E6_term2;
  cv.E7_term1 = xmy * c * ns;
  cv.E7_term2 = xmy * d * nsbar_inv;
  cv.E7_sum = cv.E7_term1 + cv.E7_term2;
  return cv;
}

IntegralityProfile profile(const ConditionVector& cv) {
  IntegralityProfile pr;
  const Elem* sums[7] = {&cv.E1, &cv.E2, &cv.E3, &cv.E4,
                         &cv.E5, &cv.E6_sum, &cv.E7_sum};
  bool all = true;
  for (int i = 0; i < 7; ++i) {
    pr.e[i] = sums[i]->is_integral();
    all = all && pr.e[i];
  }
  pr.e6_t1 = cv.E6_term1.is_integral();
  pr.e6_t2 = cv.E6_term2.is_integral();
  pr.e7_t1 = cv.E7_term1.is_integral();
  pr.e7_t2 = cv.E7_term2.is_integral();
  if (!all) {
    pr.cls = CaseClass::NotIntegral;
  } else if (pr.e6_t1 && pr.e6_t2 && pr.e7_t1 && pr.e7_t2) {
    pr.cls = CaseClass::AllSummands;
  } else if (pr.e6_t1 && pr.e6_t2) {
    // An integral sum with one integral summand forces the other, so here
    // both E7 summands are non-integral with cancelling leading terms.
    pr.cls = CaseClass::E6Only;
  } else {
    pr.cls = CaseClass::MixedSummands;
  }
  return pr;
}

}  // namespace kappa
