#include "kappa/closedform.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kappa {

namespace {

long floor_div(long a, long b) {
  long s = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? s - 1 : s;
}

long ceil_div(long a, long b) { return -floor_div(-a, b); }

// m *= (q+1), in place
void mul_q_plus_one(std::map<long, mpz_class>& m) {
  std::map<long, mpz_class> out;
  for (const auto& [e, c] : m) {
    out[e + 1] += c;
    out[e] += c;
  }
  m = std::move(out);
}

// m /= (q+1) if the division is exact; reports whether it was
bool div_q_plus_one(std::map<long, mpz_class>& m) {
  if (m.empty()) return true;
  long lo = m.begin()->first, hi = m.rbegin()->first;
  if (lo == hi) return false;
  std::vector<mpz_class> c(size_t(hi - lo + 1));
  for (const auto& [e, v] : m) c[size_t(e - lo)] = v;
  // synthetic division from the top, remainder at the constant end
  std::vector<mpz_class> b(c.size() - 1);
  b.back() = c.back();
  for (size_t i = c.size() - 2; i >= 1; --i) b[i - 1] = c[i] - b[i];
  if (c[0] != b[0]) return false;
  std::map<long, mpz_class> out;
  for (size_t i = 0; i < b.size(); ++i)
    if (b[i] != 0) out[lo + long(i)] = b[i];
  m = std::move(out);
  return true;
}

}  // namespace

LaurentPolyQ::LaurentPolyQ(long n) {
  if (n != 0) num_[0] = n;
}

LaurentPolyQ LaurentPolyQ::monomial(long coeff, long exp) {
  LaurentPolyQ r;
  if (coeff != 0) r.num_[exp] = coeff;
  return r;
}

void LaurentPolyQ::normalize() {
  for (auto it = num_.begin(); it != num_.end();)
    it = (it->second == 0) ? num_.erase(it) : std::next(it);
  if (num_.empty()) {
    den_pow_ = 0;
    return;
  }
  while (den_pow_ > 0 && div_q_plus_one(num_)) --den_pow_;
}

LaurentPolyQ LaurentPolyQ::operator+(const LaurentPolyQ& o) const {
  LaurentPolyQ r;
  r.den_pow_ = std::max(den_pow_, o.den_pow_);
  std::map<long, mpz_class> a = num_, b = o.num_;
  for (long k = den_pow_; k < r.den_pow_; ++k) mul_q_plus_one(a);
  for (long k = o.den_pow_; k < r.den_pow_; ++k) mul_q_plus_one(b);
  r.num_ = std::move(a);
  for (const auto& [e, c] : b) r.num_[e] += c;
  r.normalize();
  return r;
}

LaurentPolyQ LaurentPolyQ::operator-() const {
  LaurentPolyQ r;
  r.den_pow_ = den_pow_;
  for (const auto& [e, c] : num_) r.num_[e] = -c;
  return r;
}

LaurentPolyQ LaurentPolyQ::operator-(const LaurentPolyQ& o) const {
  return *this + (-o);
}

LaurentPolyQ LaurentPolyQ::operator*(const LaurentPolyQ& o) const {
  LaurentPolyQ r;
  r.den_pow_ = den_pow_ + o.den_pow_;
  for (const auto& [ea, ca] : num_)
    for (const auto& [eb, cb] : o.num_) r.num_[ea + eb] += ca * cb;
  r.normalize();
  return r;
}

LaurentPolyQ LaurentPolyQ::over_q_plus_one() const {
  LaurentPolyQ r = *this;
  ++r.den_pow_;
  r.normalize();
  return r;
}

bool LaurentPolyQ::operator==(const LaurentPolyQ& o) const {
  // the representation is canonical: numerator coprime to q+1 or den_pow 0
  return den_pow_ == o.den_pow_ && num_ == o.num_;
}

ExactMeasure LaurentPolyQ::eval(long q) const {
  ExactMeasure acc = 0;
  for (const auto& [e, c] : num_) acc += ExactMeasure(c) * q_power(q, e);
  ExactMeasure den = 1;
  for (long k = 0; k < den_pow_; ++k) den *= q + 1;
  return acc / den;
}

std::string LaurentPolyQ::str() const {
  if (num_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) {
    mpz_class c = it->second;
    if (first) {
      if (c < 0) {
        os << "-";
        c = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    long e = it->first;
    if (e == 0 || c != 1) os << c.get_str();
    if (e != 0) {
      os << "q";
      if (e != 1) os << "^" << e;
    }
  }
  if (den_pow_ > 0) {
    std::string n = os.str();
    std::ostringstream full;
    full << "(" << n << ")/(q+1)";
    if (den_pow_ > 1) full << "^" << den_pow_;
    return full.str();
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const LaurentPolyQ& p) {
  return os << p.str();
}

long count_even_between(long a, long b) {
  long n = floor_div(a, 2) - ceil_div(b, 2) + 1;
  return n > 0 ? n : 0;
}

namespace {

// 1 - q^-1, the mass density of one coset layer
LaurentPolyQ unit_layer() {
  return LaurentPolyQ(1) - LaurentPolyQ::monomial(1, -1);
}

LaurentPolyQ signed_by_parity(LaurentPolyQ p, long V_m, long V_p) {
  return ((V_m + V_p) % 2 != 0) ? -p : p;
}

}  // namespace

LaurentPolyQ assembled_difference(AssembledPart part, long V_m, long V_p) {
  if (V_m < 0 || V_p <= V_m)
    throw std::invalid_argument("assembled differences require 0 <= V_m < V_p");
  LaurentPolyQ Qm1 = LaurentPolyQ::monomial(1, 2 * V_m) - LaurentPolyQ(1);
  LaurentPolyQ q1 = LaurentPolyQ::monomial(1, 1);
  LaurentPolyQ body;
  switch (part) {
    case AssembledPart::extreme:
      body = LaurentPolyQ(1) + (Qm1 * q1).over_q_plus_one();
      break;
    case AssembledPart::interior_case1:
      body = (Qm1 * q1).over_q_plus_one();
      break;
    case AssembledPart::interior_case2:
      body = (Qm1 * (LaurentPolyQ(1) - q1)).over_q_plus_one();
      break;
  }
  return signed_by_parity(body, V_m, V_p);
}

LaurentPolyQ case_formula(CaseFormulaId id, std::optional<long> h, long V_m,
                          long V_p) {
  if (V_m < 0 || V_p <= V_m)
    throw std::invalid_argument("case formulas require 0 <= V_m < V_p");

  auto at_fixed = [&](long at) {
    if (h && *h != at)
      throw std::invalid_argument("this case lives at a single h");
  };
  auto in_range = [&](long lo, long hi) -> long {
    if (!h || *h < lo || *h > hi)
      throw std::invalid_argument("h outside the regime of this case");
    return *h;
  };
  auto no_h = [&] {
    if (h) throw std::invalid_argument("this case does not take an h");
  };

  LaurentPolyQ u = unit_layer();
  auto mono = LaurentPolyQ::monomial;

  switch (id) {
    case CaseFormulaId::posOne:
      at_fixed(V_m);
      return LaurentPolyQ((V_m + V_p) % 2 == 0 ? V_p + 1 : V_p);
    case CaseFormulaId::posTwo: {
      at_fixed(V_m);
      LaurentPolyQ s;
      for (long v = -2 * V_m; v <= -1; ++v)
        s = s + mono(count_even_between(V_m + V_p + v, V_m - V_p), -v);
      return u * s;
    }
    case CaseFormulaId::posThree: {
      long hh = in_range(-V_m, V_m - 1);
      return mono(count_even_between(2 * hh + V_p - V_m, hh - V_p), V_m - hh) *
             u;
    }
    case CaseFormulaId::posFour: {
      long hh = in_range(-V_m, V_m - 1);
      LaurentPolyQ s;
      for (long v = -hh - V_m; v <= -1; ++v)
        s = s + mono(count_even_between(2 * hh + V_p - V_m + v, hh - V_p), -v);
      return mono(1, V_m - hh) * u * u * s;
    }
    case CaseFormulaId::negOne:
      at_fixed(-V_m - 1);
      return LaurentPolyQ((V_m + V_p) % 2 == 0 ? V_p : V_p + 1);
    case CaseFormulaId::negTwo: {
      at_fixed(-V_m - 1);
      LaurentPolyQ s;
      for (long v = -2 * V_m; v <= -1; ++v)
        s = s + mono(count_even_between(V_p - V_m - 1 + v, -V_p - V_m - 1), -v);
      return u * s;
    }
    case CaseFormulaId::negThree: {
      long hh = in_range(-V_m, V_m - 1);
      return mono(count_even_between(V_p - V_m - 1, hh - V_p), V_m + hh + 1) *
             u;
    }
    case CaseFormulaId::negFour: {
      long hh = in_range(-V_m, V_m - 1);
      LaurentPolyQ s;
      for (long v = hh + 1 - V_m; v <= -1; ++v)
        s = s + mono(count_even_between(V_p - V_m - 1 + v, hh - V_p), -v);
      return mono(1, V_m + hh + 1) * u * u * s;
    }
    case CaseFormulaId::posFive: {
      long hh = in_range(-V_m, V_m);
      LaurentPolyQ s;
      for (long v = hh - V_p; v <= hh - V_m - 1; ++v)
        s = s + mono(count_even_between(V_p - hh + 2 * v, hh - V_p), -v);
      return mono(1, V_m + hh) * u * s;
    }
    case CaseFormulaId::negFive: {
      long hh = in_range(-V_m - 1, V_m - 1);
      LaurentPolyQ s;
      for (long v = hh - V_p + 1; v <= hh - V_m; ++v)
        s = s + mono(count_even_between(V_p - hh + 2 * v - 2, hh - V_p), -v);
      return mono(1, V_m + hh + 1) * u * s;
    }
    case CaseFormulaId::extreme:
      no_h();
      return assembled_difference(AssembledPart::extreme, V_m, V_p);
    case CaseFormulaId::case1_diff:
      no_h();
      return assembled_difference(AssembledPart::interior_case1, V_m, V_p);
    case CaseFormulaId::case2_diff:
      no_h();
      return assembled_difference(AssembledPart::interior_case2, V_m, V_p);
  }
  throw std::logic_error("unreachable");
}

CaseSlice case_slice(CaseFormulaId id, long V_m) {
  using SC = SummandClass;
  switch (id) {
    case CaseFormulaId::posOne:
      return {Side::one_zero, SC::all_summands, CSplit::c_nonneg, V_m, V_m};
    case CaseFormulaId::posTwo:
      return {Side::one_zero, SC::all_summands, CSplit::c_neg, V_m, V_m};
    case CaseFormulaId::posThree:
      return {Side::one_zero, SC::all_summands, CSplit::c_nonneg, -V_m, V_m - 1};
    case CaseFormulaId::posFour:
      return {Side::one_zero, SC::all_summands, CSplit::c_neg, -V_m, V_m - 1};
    case CaseFormulaId::negOne:
      return {Side::zero_one, SC::all_summands, CSplit::d_nonneg, -V_m - 1,
              -V_m - 1};
    case CaseFormulaId::negTwo:
      return {Side::zero_one, SC::all_summands, CSplit::d_neg, -V_m - 1,
              -V_m - 1};
    case CaseFormulaId::negThree:
      return {Side::zero_one, SC::all_summands, CSplit::d_nonneg, -V_m, V_m - 1};
    case CaseFormulaId::negFour:
      return {Side::zero_one, SC::all_summands, CSplit::d_neg, -V_m, V_m - 1};
    case CaseFormulaId::posFive:
      return {Side::one_zero, SC::e6_only, CSplit::all, -V_m, V_m};
    case CaseFormulaId::negFive:
      return {Side::zero_one, SC::e6_only, CSplit::all, -V_m - 1, V_m - 1};
    default:
      throw std::invalid_argument("case_slice: not a per-case display id");
  }
}

const char* case_formula_name(CaseFormulaId id) {
  switch (id) {
    case CaseFormulaId::posOne: return "posOne";
    case CaseFormulaId::posTwo: return "posTwo";
    case CaseFormulaId::posThree: return "posThree";
    case CaseFormulaId::posFour: return "posFour";
    case CaseFormulaId::negOne: return "negOne";
    case CaseFormulaId::negTwo: return "negTwo";
    case CaseFormulaId::negThree: return "negThree";
    case CaseFormulaId::negFour: return "negFour";
    case CaseFormulaId::posFive: return "posFive";
    case CaseFormulaId::negFive: return "negFive";
    case CaseFormulaId::extreme: return "extreme";
    case CaseFormulaId::case1_diff: return "case1_diff";
    case CaseFormulaId::case2_diff: return "case2_diff";
  }
  return "?";
}

ExactMeasure kappa_orbital_closed(long V_m, long V_p, long q) {
  if (V_m < 0 || V_p <= V_m)
    throw std::invalid_argument("no closed form outside 0 <= V_m < V_p");
  ExactMeasure v = q_power(q, 2 * V_m);
  return ((V_m + V_p) % 2 != 0) ? -v : v;
}

ExactMeasure endoscopic_stable_orbital(const Elem& x, const Elem& y) {
  if (x.is_zero() || y.is_zero() || !x.is_in_F() || !y.is_in_F())
    throw std::invalid_argument(
        "matching point needs nonzero coordinates in the fixed field");
  return (x.is_integral() && y.is_integral()) ? 1 : 0;
}

ExactMeasure transfer_factor(const GammaParams& g) {
  ExactMeasure v = q_power(g.x.ctx().p, 2 * g.V_m);
  return ((g.V_m + g.V_p) % 2 != 0) ? -v : v;
}

long discriminant_power(const GammaParams& g) { return 2 * g.V_m; }

}  // namespace kappa
