#include "kappa/localfield.hpp"

#include <algorithm>
#include <cassert>
#include <climits>
#include <sstream>

namespace kappa {

namespace {
constexpr long kFarAway = LONG_MAX / 4;  // stand-in for "known forever"

bool is_odd_prime(int p) {
  if (p < 3 || p % 2 == 0) return false;
  for (int d = 3; (long)d * d <= p; d += 2)
    if (p % d == 0) return false;
  return true;
}

int pow_mod(int base, int e, int p) {
  long r = 1, b = base % p;
  if (b < 0) b += p;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return int(r);
}
}  // namespace

FieldContext::FieldContext(int p_, int nu_, int default_precision_)
    : p(p_), nu(nu_), default_precision(default_precision_) {
  if (!is_odd_prime(p)) throw std::invalid_argument("q must be an odd prime");
  if (default_precision < 1) throw std::invalid_argument("precision must be positive");
  if (nu <= 0 || nu >= p || is_square(nu))
    throw std::invalid_argument("nu must be a nonresidue mod q");
}

FieldContext FieldContext::make(int p, int default_precision) {
  if (!is_odd_prime(p)) throw std::invalid_argument("q must be an odd prime");
  for (int nu = 2; nu < p; ++nu) {
    if (pow_mod(nu, (p - 1) / 2, p) == p - 1)
      return FieldContext(p, nu, default_precision);
  }
  throw std::logic_error("no nonresidue found");  // unreachable for odd primes
}

bool FieldContext::is_square(int x) const {
  x %= p;
  if (x < 0) x += p;
  if (x == 0) return true;
  return pow_mod(x, (p - 1) / 2, p) == 1;
}

int FieldContext::inv(int x) const {
  assert(x % p != 0);
  return pow_mod(x, p - 2, p);
}

Res FieldContext::rinv(Res x) const {
  assert(!x.is_zero());
  // (a + b d)^{-1} = (a - b d) / (a^2 - nu b^2); the denominator is the norm
  // to F_q and is nonzero because nu is a nonresidue.
  int den = sub(mul(x.a, x.a), mul(nu, mul(x.b, x.b)));
  int di = inv(den);
  return {int16_t(mul(x.a, di)), int16_t(mul(neg(x.b), di))};
}

// --- Elem ---

Elem Elem::zero(const FieldContext& ctx) {
  Elem e;
  e.ctx_ = &ctx;
  e.exact_ = true;
  e.zero_ = true;
  return e;
}

Elem Elem::from_int(const FieldContext& ctx, long n) {
  int r = int(n % ctx.p);
  if (r < 0) r += ctx.p;
  return monomial(ctx, Res{int16_t(r), 0}, 0);
}

Elem Elem::delta(const FieldContext& ctx) { return monomial(ctx, Res{0, 1}, 0); }

Elem Elem::pi_pow(const FieldContext& ctx, long k) {
  return monomial(ctx, Res{1, 0}, k);
}

Elem Elem::monomial(const FieldContext& ctx, Res c, long k) {
  if (c.is_zero()) return zero(ctx);
  Elem e;
  e.ctx_ = &ctx;
  e.exact_ = true;
  e.val_ = k;
  e.cf_ = {c};
  return e;
}

Elem Elem::from_coeffs(const FieldContext& ctx, long val, std::vector<Res> cf) {
  Elem e;
  e.ctx_ = &ctx;
  e.exact_ = true;
  e.val_ = val;
  e.cf_ = std::move(cf);
  e.normalize();
  return e;
}

Elem Elem::window(const FieldContext& ctx, long val, std::vector<Res> cf,
                  uint8_t src) {
  Elem e;
  e.ctx_ = &ctx;
  e.exact_ = false;
  e.val_ = val;
  e.prec_ = val + long(cf.size());
  e.src_ = src;
  e.cf_ = std::move(cf);
  e.normalize();
  return e;
}

void Elem::normalize() {
  if (zero_) {
    cf_.clear();
    return;
  }
  size_t lead = 0;
  while (lead < cf_.size() && cf_[lead].is_zero()) ++lead;
  if (lead > 0) {
    cf_.erase(cf_.begin(), cf_.begin() + lead);
    val_ += long(lead);
  }
  if (exact_) {
    while (!cf_.empty() && cf_.back().is_zero()) cf_.pop_back();
    if (cf_.empty()) {
      zero_ = true;
      val_ = 0;
    }
  } else if (cf_.empty()) {
    val_ = prec_;  // pure unknown: v >= prec_
  }
}

Res Elem::at(long e) const {
  if (zero_ || e < val_) return Res{};
  size_t idx = size_t(e - val_);
  if (idx < cf_.size()) return cf_[idx];
  assert(exact_);  // window callers must stay below prec_
  return Res{};
}

long Elem::valuation() const {
  if (zero_) throw std::domain_error("valuation of zero");
  if (!exact_ && cf_.empty()) throw insufficient_precision(src_);
  return val_;
}

std::optional<long> Elem::valuation_opt() const {
  if (zero_) return std::nullopt;
  if (!exact_ && cf_.empty()) throw insufficient_precision(src_);
  return val_;
}

long Elem::valuation_lower_bound() const {
  if (zero_) return kFarAway;
  return val_;  // empty windows keep val_ == prec_
}

Tri Elem::valuation_at_least(long k) const {
  if (zero_) return Tri::True;
  if (!cf_.empty()) return val_ >= k ? Tri::True : Tri::False;
  // unknown beyond prec_ only
  return prec_ >= k ? Tri::True : Tri::Unknown;
}

bool Elem::is_integral() const {
  Tri t = valuation_at_least(0);
  if (t == Tri::Unknown) throw insufficient_precision(src_);
  return t == Tri::True;
}

bool Elem::is_in_F() const {
  for (const Res& c : cf_)
    if (c.b != 0) return false;
  return true;
}

bool Elem::is_in_Fdelta() const {
  for (const Res& c : cf_)
    if (c.a != 0) return false;
  return true;
}

Res Elem::coeff(long k) const {
  if (zero_ || k < val_) return Res{};
  if (!exact_ && k >= prec_) throw insufficient_precision(src_);
  return at(k);
}

long Elem::known_until() const {
  if (exact_) return kFarAway;
  return prec_;
}

Elem Elem::rebase(const FieldContext& ctx2) const {
  assert(*ctx_ == ctx2);
  Elem r = *this;
  r.ctx_ = &ctx2;
  return r;
}

Elem Elem::operator+(const Elem& o) const {
  assert(ctx_ == o.ctx_ || *ctx_ == *o.ctx_);
  if (zero_) return o;
  if (o.zero_) return *this;
  Elem r;
  r.ctx_ = ctx_;
  r.exact_ = exact_ && o.exact_;
  long lo = std::min(val_, o.val_);
  long hi;
  if (r.exact_) {
    r.src_ = uint8_t(src_ | o.src_);
    hi = std::max(val_ + long(cf_.size()), o.val_ + long(o.cf_.size()));
  } else {
    hi = kFarAway;
    if (!exact_) hi = std::min(hi, prec_);
    if (!o.exact_) hi = std::min(hi, o.prec_);
    r.prec_ = hi;
    // Only the windows that cap the result's precision are to blame for it;
    // refining anything else cannot extend the known digits.
    uint8_t m = 0;
    if (!exact_ && prec_ <= hi) m |= src_;
    if (!o.exact_ && o.prec_ <= hi) m |= o.src_;
    r.src_ = m;
  }
  r.val_ = lo;
  r.cf_.resize(size_t(hi - lo));
  for (long e = lo; e < hi; ++e)
    r.cf_[size_t(e - lo)] = ctx_->radd(at(e), o.at(e));
  r.normalize();
  return r;
}

Elem Elem::operator-() const {
  Elem r = *this;
  for (Res& c : r.cf_) c = ctx_->rneg(c);
  return r;
}

Elem Elem::operator-(const Elem& o) const { return *this + (-o); }

Elem Elem::operator*(const Elem& o) const {
  assert(ctx_ == o.ctx_ || *ctx_ == *o.ctx_);
  if (zero_ || o.zero_) return zero(*ctx_);
  Elem r;
  r.ctx_ = ctx_;
  r.exact_ = exact_ && o.exact_;
  long lo = val_ + o.val_;
  long hi;
  if (r.exact_) {
    r.src_ = uint8_t(src_ | o.src_);
    hi = val_ + long(cf_.size()) + o.val_ + long(o.cf_.size()) - 1;
    if (cf_.empty() || o.cf_.empty()) hi = lo;  // unreachable: normalized
  } else {
    long ha = exact_ ? kFarAway : prec_ + o.val_;
    long hb = o.exact_ ? kFarAway : o.prec_ + val_;
    hi = std::min(ha, hb);
    r.prec_ = hi;
    uint8_t m = 0;  // blame only the precision-limiting windows
    if (!exact_ && ha <= hi) m |= src_;
    if (!o.exact_ && hb <= hi) m |= o.src_;
    r.src_ = m;
  }
  r.val_ = lo;
  r.cf_.assign(size_t(std::max(hi - lo, 0L)), Res{});
  for (size_t i = 0; i < cf_.size(); ++i) {
    if (cf_[i].is_zero()) continue;
    long ea = val_ + long(i);
    for (size_t j = 0; j < o.cf_.size(); ++j) {
      long e = ea + o.val_ + long(j);
      if (e >= hi && !r.exact_) break;
      if (r.exact_ && e - lo >= long(r.cf_.size())) break;
      Res t = ctx_->rmul(cf_[i], o.cf_[j]);
      Res& dst = r.cf_[size_t(e - lo)];
      dst = ctx_->radd(dst, t);
    }
  }
  r.normalize();
  return r;
}

bool Elem::operator==(const Elem& o) const {
  if (!exact_ || !o.exact_)
    throw std::logic_error("equality requires exact elements");
  return zero_ == o.zero_ && (zero_ || (val_ == o.val_ && cf_ == o.cf_));
}

Elem Elem::conj() const {
  Elem r = *this;
  for (Res& c : r.cf_) c = ctx_->rconj(c);
  return r;
}

Elem Elem::norm() const { return *this * conj(); }

Elem Elem::inv() const {
  if (zero_) throw std::domain_error("inverse of zero");
  if (!exact_ && cf_.empty()) throw insufficient_precision(src_);
  if (exact_ && cf_.size() == 1)
    return monomial(*ctx_, ctx_->rinv(cf_[0]), -val_);
  // Series inversion off the leading term.  An exact non-monomial gets the
  // context's digit budget; a window keeps its own relative precision.
  size_t w = exact_ ? size_t(ctx_->default_precision) : cf_.size();
  Res u0i = ctx_->rinv(cf_[0]);
  std::vector<Res> out(w);
  out[0] = u0i;
  for (size_t k = 1; k < w; ++k) {
    Res acc{};
    for (size_t i = 1; i <= k; ++i) {
      Res ui = i < cf_.size() ? cf_[i] : Res{};
      if (ui.is_zero()) continue;
      acc = ctx_->radd(acc, ctx_->rmul(ui, out[k - i]));
    }
    out[k] = ctx_->rneg(ctx_->rmul(u0i, acc));
  }
  Elem r;
  r.ctx_ = ctx_;
  r.exact_ = false;
  r.val_ = -val_;
  r.prec_ = -val_ + long(w);
  r.src_ = src_;
  r.cf_ = std::move(out);
  r.normalize();
  return r;
}

Elem Elem::shift(long k) const {
  if (zero_) return *this;
  Elem r = *this;
  r.val_ += k;
  if (!r.exact_) r.prec_ += k;
  return r;
}

Elem Elem::scale(Res c) const {
  if (zero_) return *this;
  if (c.is_zero()) return zero(*ctx_);
  Elem r = *this;
  for (Res& x : r.cf_) x = ctx_->rmul(x, c);
  return r;  // c != 0 keeps the leading coefficient nonzero
}

Elem Elem::truncated(long new_prec) const {
  if (zero_) return *this;
  if (!exact_ && new_prec >= prec_) return *this;
  Elem r;
  r.ctx_ = ctx_;
  r.exact_ = false;
  r.src_ = src_;
  if (new_prec <= val_) {
    r.val_ = r.prec_ = new_prec;
    return r;
  }
  r.val_ = val_;
  r.prec_ = new_prec;
  r.cf_.resize(size_t(new_prec - val_));
  for (long e = val_; e < new_prec; ++e) r.cf_[size_t(e - val_)] = at(e);
  r.normalize();
  return r;
}

std::string Elem::to_string() const {
  if (zero_) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit_res = [&](Res c) -> std::string {
    std::ostringstream t;
    if (c.b == 0) t << c.a;
    else if (c.a == 0) t << (c.b == 1 ? "" : std::to_string(c.b)) << "d";
    else t << "(" << c.a << "+" << (c.b == 1 ? "" : std::to_string(c.b)) << "d)";
    return t.str();
  };
  for (size_t i = 0; i < cf_.size(); ++i) {
    if (cf_[i].is_zero()) continue;
    long e = val_ + long(i);
    if (!first) os << " + ";
    first = false;
    std::string cs = emit_res(cf_[i]);
    if (e == 0) os << cs;
    else {
      if (cs == "1") os << "pi^" << e;
      else os << cs << "*pi^" << e;
    }
  }
  if (first) os << "0";
  if (!exact_) os << " + O(pi^" << prec_ << ")";
  return os.str();
}

bool check_residue_split(const Elem& a, const Elem& b, const Elem& x) {
  if (!a.is_in_F() || !b.is_in_F() || !x.is_in_Fdelta())
    throw std::invalid_argument("check_residue_split: membership violated");
  Elem ax = a * x;
  if (!(ax + b).is_integral()) return true;  // vacuous
  return ax.is_integral() && b.is_integral();
}

std::vector<UnitClass> enumerate_units(const FieldContext& ctx, int K,
                                       Subfield sub) {
  if (K < 1) throw std::invalid_argument("enumerate_units: K >= 1");
  const int q = ctx.p;
  // Digits per level: all residues of the subfield; the leading digit is
  // restricted to nonzero.
  std::vector<Res> digits;
  if (sub == Subfield::E) {
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) digits.push_back({int16_t(a), int16_t(b)});
  } else if (sub == Subfield::F) {
    for (int a = 0; a < q; ++a) digits.push_back({int16_t(a), 0});
  } else {
    for (int b = 0; b < q; ++b) digits.push_back({0, int16_t(b)});
  }
  mpz_class count = long(digits.size()) - 1;  // leading digit choices
  for (int t = 1; t < K; ++t) count *= long(digits.size());
  mpq_class mass = mpq_class(1) / mpq_class(count);

  std::vector<UnitClass> out;
  std::vector<Res> cur(static_cast<size_t>(K));
  std::vector<size_t> idx(static_cast<size_t>(K), 0);
  // Odometer over digit strings with nonzero leading digit.
  auto emit = [&]() {
    out.push_back({Elem::from_coeffs(ctx, 0, cur), mass});
  };
  // position 0 skips the zero digit (digits[0] is zero for every subfield)
  for (idx[0] = 1; idx[0] < digits.size(); ++idx[0]) {
    cur[0] = digits[idx[0]];
    if (K == 1) {
      emit();
      continue;
    }
    std::fill(idx.begin() + 1, idx.end(), 0);
    for (size_t i = 1; i < size_t(K); ++i) cur[i] = digits[0];
    while (true) {
      emit();
      size_t carry = size_t(K) - 1;
      while (carry >= 1) {
        if (++idx[carry] < digits.size()) {
          cur[carry] = digits[idx[carry]];
          break;
        }
        idx[carry] = 0;
        cur[carry] = digits[0];
        --carry;
        if (carry == 0) break;
      }
      if (carry == 0) break;
    }
  }
  return out;
}

}  // namespace kappa
