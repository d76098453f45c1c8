#include "kappa/unitary.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace kappa {
namespace {

// Exponent far beyond any window; valuation_at_least(kBig) == False is a
// certified nonzero digit, True only for the exact zero.
constexpr long kBig = 1L << 40;

bool visibly_nonzero(const Elem& e) {
  return e.valuation_at_least(kBig) == Tri::False;
}

bool visibly_equal(const Elem& a, const Elem& b) {
  return !visibly_nonzero(a - b);
}

}  // namespace

MatE::MatE(const FieldContext& ctx)
    : ctx_(&ctx), e_(16, Elem::zero(ctx)) {}

MatE MatE::identity(const FieldContext& ctx) {
  MatE m(ctx);
  for (int i = 0; i < 4; ++i) m.at(i, i) = Elem::one(ctx);
  return m;
}

MatE MatE::operator+(const MatE& o) const {
  MatE r(*ctx_);
  for (size_t k = 0; k < 16; ++k) r.e_[k] = e_[k] + o.e_[k];
  return r;
}

MatE MatE::operator-(const MatE& o) const {
  MatE r(*ctx_);
  for (size_t k = 0; k < 16; ++k) r.e_[k] = e_[k] - o.e_[k];
  return r;
}

MatE MatE::operator*(const MatE& o) const {
  MatE r(*ctx_);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Elem s = Elem::zero(*ctx_);
      for (int k = 0; k < 4; ++k) s = s + at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

MatE MatE::operator-() const {
  MatE r(*ctx_);
  for (size_t k = 0; k < 16; ++k) r.e_[k] = -e_[k];
  return r;
}

bool MatE::operator==(const MatE& o) const {
  for (size_t k = 0; k < 16; ++k)
    if (!(e_[k] == o.e_[k])) return false;
  return true;
}

MatE MatE::conj() const {
  MatE r(*ctx_);
  for (size_t k = 0; k < 16; ++k) r.e_[k] = e_[k].conj();
  return r;
}

MatE MatE::transpose() const {
  MatE r(*ctx_);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.at(i, j) = at(j, i);
  return r;
}

MatE MatE::scale(const Elem& a) const {
  MatE r(*ctx_);
  for (size_t k = 0; k < 16; ++k) r.e_[k] = a * e_[k];
  return r;
}

Elem MatE::trace() const {
  Elem s = Elem::zero(*ctx_);
  for (int i = 0; i < 4; ++i) s = s + at(i, i);
  return s;
}

namespace {

// Determinant of the submatrix on rows[0..n) x cols[0..n), minor expansion.
Elem subdet(const MatE& m, const int* rows, const int* cols, int n) {
  if (n == 1) return m.at(rows[0], cols[0]);
  Elem s = Elem::zero(m.ctx());
  int sub[4];
  for (int j = 0; j < n; ++j) {
    int t = 0;
    for (int k = 0; k < n; ++k)
      if (k != j) sub[t++] = cols[k];
    Elem term = m.at(rows[0], cols[j]) * subdet(m, rows + 1, sub, n - 1);
    s = (j % 2 == 0) ? s + term : s - term;
  }
  return s;
}

}  // namespace

Elem MatE::principal_minor_sum(int k) const {
  assert(k >= 1 && k <= 4);
  Elem s = Elem::zero(*ctx_);
  int idx[4];
  for (int mask = 0; mask < 16; ++mask) {
    if (__builtin_popcount(unsigned(mask)) != k) continue;
    int n = 0;
    for (int i = 0; i < 4; ++i)
      if (mask & (1 << i)) idx[n++] = i;
    s = s + subdet(*this, idx, idx, k);
  }
  return s;
}

MatE form_J(const FieldContext& ctx) {
  MatE j(ctx);
  for (int i = 0; i < 4; ++i) j.at(i, 3 - i) = Elem::one(ctx);
  return j;
}

MatE theta_mat(const FieldContext& ctx) {
  MatE t(ctx);
  t.at(0, 3) = Elem::one(ctx);
  t.at(1, 2) = -Elem::one(ctx);
  t.at(2, 1) = -Elem::one(ctx);
  t.at(3, 0) = Elem::one(ctx);
  return t;
}

MatE theta(const MatE& g) {
  MatE t = theta_mat(g.ctx());
  return t * g * t;  // t is an involution, so t^-1 = t
}

bool is_in_U4(const MatE& g) {
  MatE j = form_J(g.ctx());
  MatE d = g.conj().transpose() * j * g - j;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      if (visibly_nonzero(d.at(i, k))) return false;
  return true;
}

bool is_in_u4(const MatE& x) {
  MatE j = form_J(x.ctx());
  MatE d = (-(j * x.conj().transpose() * j)) - x;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      if (visibly_nonzero(d.at(i, k))) return false;
  return true;
}

GammaParams make_gamma_params(const Elem& x, const Elem& y) {
  if (x.is_zero() || y.is_zero())
    throw std::invalid_argument("gamma requires nonzero x, y");
  if (!x.is_in_F() || !y.is_in_F())
    throw std::invalid_argument("gamma requires x, y in F");
  Elem diff = x - y, sum = x + y;
  if (diff.is_zero() || sum.is_zero())
    throw std::invalid_argument("gamma requires x != +-y");
  GammaParams gp;
  gp.x = x;
  gp.y = y;
  gp.V_m = diff.valuation();
  gp.V_p = sum.valuation();
  return gp;
}

SymmetricSpaceElem assemble_g1(const Elem& x11, const Elem& x22,
                               const Elem& x12, const Elem& x13,
                               const Elem& x14, const Elem& x23) {
  if (!x11.is_in_F() || !x22.is_in_F())
    throw std::invalid_argument("x11, x22 must lie in F");
  if (!x14.is_in_Fdelta() || !x23.is_in_Fdelta())
    throw std::invalid_argument("x14, x23 must lie in Fdelta");
  const FieldContext& ctx = x11.ctx();
  SymmetricSpaceElem s{x11, x22, x12, x13, x14, x23, MatE(ctx)};
  MatE& m = s.mat;
  m.at(0, 0) = x11;
  m.at(0, 1) = x12;
  m.at(0, 2) = x13;
  m.at(0, 3) = x14;
  m.at(1, 0) = -x12.conj();
  m.at(1, 1) = x22;
  m.at(1, 2) = x23;
  m.at(1, 3) = -x13.conj();
  m.at(2, 0) = -x13.conj();
  m.at(2, 1) = -x23;
  m.at(2, 2) = -x22;
  m.at(2, 3) = -x12.conj();
  m.at(3, 0) = -x14;
  m.at(3, 1) = x13;
  m.at(3, 2) = x12;
  m.at(3, 3) = -x11;
  return s;
}

bool is_in_g1F(const MatE& X) {
  const Elem &x11 = X.at(0, 0), &x12 = X.at(0, 1), &x13 = X.at(0, 2),
             &x14 = X.at(0, 3), &x22 = X.at(1, 1), &x23 = X.at(1, 2);
  if (!x11.is_in_F() || !x22.is_in_F()) return false;
  if (!x14.is_in_Fdelta() || !x23.is_in_Fdelta()) return false;
  return visibly_equal(X.at(1, 0), -x12.conj()) &&
         visibly_equal(X.at(1, 3), -x13.conj()) &&
         visibly_equal(X.at(2, 0), -x13.conj()) &&
         visibly_equal(X.at(2, 1), -x23) &&
         visibly_equal(X.at(2, 2), -x22) &&
         visibly_equal(X.at(2, 3), -x12.conj()) &&
         visibly_equal(X.at(3, 0), -x14) &&
         visibly_equal(X.at(3, 1), x13) &&
         visibly_equal(X.at(3, 2), x12) &&
         visibly_equal(X.at(3, 3), -x11);
}

SymmetricSpaceElem make_gamma(const GammaParams& gp) {
  const FieldContext& ctx = gp.x.ctx();
  Elem z = Elem::zero(ctx);
  return assemble_g1(gp.x, gp.y, z, z, z, z);
}

namespace {

// Block pattern shared by B and its inverse:
//   1/2 [[w+1, 1-w, 0, 0], [1-w, w+1, 0, 0],
//        [0, 0, w+1, w-1], [0, 0, w-1, w+1]]
// with w = pi^-1 for B and w = pi for the inverse.
MatE transfer_block(const FieldContext& ctx, long wexp) {
  Res half = ctx.rhalf();
  Elem w = Elem::pi_pow(ctx, wexp);
  Elem one = Elem::one(ctx);
  Elem wp = (w + one).scale(half);  // (w+1)/2
  Elem wm = (w - one).scale(half);  // (w-1)/2
  MatE b(ctx);
  b.at(0, 0) = wp;
  b.at(0, 1) = -wm;
  b.at(1, 0) = -wm;
  b.at(1, 1) = wp;
  b.at(2, 2) = wp;
  b.at(2, 3) = wm;
  b.at(3, 2) = wm;
  b.at(3, 3) = wp;
  return b;
}

}  // namespace

MatE transfer_B(const FieldContext& ctx) {
  MatE b = transfer_block(ctx, -1);
  assert(b * transfer_block(ctx, +1) == MatE::identity(ctx));
  return b;
}

MatE transfer_B_inv(const FieldContext& ctx) {
  MatE bi = transfer_block(ctx, +1);
  assert(transfer_block(ctx, -1) * bi == MatE::identity(ctx));
  return bi;
}

SymmetricSpaceElem make_gamma_stc(const GammaParams& gp) {
  const FieldContext& ctx = gp.x.ctx();
  MatE g = make_gamma(gp).mat;
  MatE m = transfer_B(ctx) * g * transfer_B_inv(ctx);
  if (!is_in_g1F(m)) throw std::logic_error("transfer left the -1-eigenspace");
  SymmetricSpaceElem s = assemble_g1(m.at(0, 0), m.at(1, 1), m.at(0, 1),
                                     m.at(0, 2), m.at(0, 3), m.at(1, 2));
  assert(s.mat == m);
  return s;
}

MatE unipotent(const Elem& c, const Elem& d) {
  if (!c.is_in_Fdelta() || !d.is_in_Fdelta())
    throw std::invalid_argument("unipotent coordinates must lie in Fdelta");
  const FieldContext& ctx = c.ctx();
  Elem one = Elem::one(ctx);
  MatE u(ctx);
  u.at(0, 0) = c + one;
  u.at(0, 1) = d;
  u.at(0, 2) = c;
  u.at(0, 3) = -d;
  u.at(1, 0) = -d;
  u.at(1, 1) = -c + one;
  u.at(1, 2) = -d;
  u.at(1, 3) = c;
  u.at(2, 0) = -c;
  u.at(2, 1) = -d;
  u.at(2, 2) = -c + one;
  u.at(2, 3) = d;
  u.at(3, 0) = -d;
  u.at(3, 1) = -c;
  u.at(3, 2) = -d;
  u.at(3, 3) = c + one;
  return u;
}

MatE levi(const Elem& r1, const Elem& r2) {
  const FieldContext& ctx = r1.ctx();
  // signs of (r1, r2, conj(r1)^-1, conj(r2)^-1) per entry
  static const int sgn[4][4][4] = {
      {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, -1, 1}, {-1, 1, -1, 1}},
      {{1, 1, -1, -1}, {1, 1, 1, 1}, {1, -1, 1, -1}, {-1, 1, 1, -1}},
      {{1, -1, -1, 1}, {1, -1, 1, -1}, {1, 1, 1, 1}, {-1, -1, 1, 1}},
      {{-1, 1, -1, 1}, {-1, 1, 1, -1}, {-1, -1, 1, 1}, {1, 1, 1, 1}}};
  Elem t[4] = {r1, r2, r1.conj().inv(), r2.conj().inv()};
  Res quarter = ctx.rmul(ctx.rhalf(), ctx.rhalf());
  MatE m(ctx);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Elem s = Elem::zero(ctx);
      for (int k = 0; k < 4; ++k) s = sgn[i][j][k] > 0 ? s + t[k] : s - t[k];
      m.at(i, j) = s.scale(quarter);
    }
  return m;
}

MatE cochar(const Elem& r) {
  if (!r.is_in_F()) throw std::invalid_argument("cocharacter argument not in F");
  const FieldContext& ctx = r.ctx();
  Res half = ctx.rhalf();
  Elem ri = r.inv();
  Elem a = (r + ri).scale(half);
  Elem b = (ri - r).scale(half);
  MatE m(ctx);
  m.at(0, 0) = a;
  m.at(0, 2) = b;
  m.at(2, 0) = b;
  m.at(2, 2) = a;
  m.at(1, 1) = a;
  m.at(1, 3) = -b;
  m.at(3, 1) = -b;
  m.at(3, 3) = a;
  return m;
}

const int coord_mix[6][6] = {{0, -1, 1, 0, -1, 1}, {1, -1, -1, -1, 0, 0},
                             {0, 1, 1, 0, -1, -1}, {1, 1, -1, 1, 0, 0},
                             {1, 1, 1, -1, 0, 0},  {1, -1, 1, 1, 0, 0}};

namespace {

long int_det(const int m[6][6], const int* rows, const int* cols, int n) {
  if (n == 1) return m[rows[0]][cols[0]];
  long s = 0;
  int sub[6];
  for (int j = 0; j < n; ++j) {
    if (m[rows[0]][cols[j]] != 0) {
      int t = 0;
      for (int k = 0; k < n; ++k)
        if (k != j) sub[t++] = cols[k];
      long minor = int_det(m, rows + 1, sub, n - 1);
      s += (j % 2 == 0 ? 1 : -1) * m[rows[0]][cols[j]] * minor;
    }
  }
  return s;
}

}  // namespace

long coord_mix_det() {
  int idx[6] = {0, 1, 2, 3, 4, 5};
  return int_det(coord_mix, idx, idx, 6);
}

std::array<Elem, 6> g1_coordinates(const MatE& Y) {
  return {Y.at(0, 0), Y.at(0, 1), Y.at(0, 2),
          Y.at(0, 3), Y.at(1, 1), Y.at(1, 2)};
}

std::array<Elem, 6> coordinate_combinations(const MatE& Y) {
  std::array<Elem, 6> v = g1_coordinates(Y);
  std::array<Elem, 6> out{Elem::zero(Y.ctx()), Elem::zero(Y.ctx()),
                          Elem::zero(Y.ctx()), Elem::zero(Y.ctx()),
                          Elem::zero(Y.ctx()), Elem::zero(Y.ctx())};
  for (int i = 0; i < 6; ++i) {
    Elem s = Elem::zero(Y.ctx());
    for (int j = 0; j < 6; ++j) {
      if (coord_mix[i][j] == 1) s = s + v[size_t(j)];
      if (coord_mix[i][j] == -1) s = s - v[size_t(j)];
    }
    // rows 1, 2, 4 carry the conjugated combinations
    out[size_t(i)] = (i == 1 || i == 2 || i == 4) ? s.conj() : s;
  }
  return out;
}

MatE conjugated_element(const Elem& c, const Elem& d, const Elem& r1,
                        const Elem& r2, const MatE& gamma) {
  MatE u = unipotent(c, d);
  MatE ui = unipotent(-c, -d);
  MatE m = levi(r1, r2);
  MatE mi = levi(r1.inv(), r2.inv());
  return ui * (mi * gamma * m) * u;
}

bool direct_integrality(const Elem& c, const Elem& d, const Elem& r1,
                        const Elem& r2, const SymmetricSpaceElem& gamma) {
  const FieldContext& ctx = c.ctx();
  auto spread = [](const Elem& e) {
    if (e.is_zero()) return 0L;
    long v = e.valuation_lower_bound();
    return v < 0 ? -v : v;
  };
  long widest = std::max(
      {spread(c), spread(d), spread(r1), spread(r2), spread(gamma.x11),
       spread(gamma.x22), spread(gamma.x12), spread(gamma.x13)});
  long budget = std::max(long(ctx.default_precision), 8 + 2 * widest);
  for (int attempt = 0;; ++attempt) {
    FieldContext wide(ctx.p, ctx.nu, int(budget));
    try {
      MatE g(wide);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g.at(i, j) = gamma.mat.at(i, j).rebase(wide);
      MatE y = conjugated_element(c.rebase(wide), d.rebase(wide),
                                  r1.rebase(wide), r2.rebase(wide), g);
      for (const Elem& e : g1_coordinates(y))
        if (!e.is_integral()) return false;
      return true;
    } catch (const insufficient_precision&) {
      // Widening only helps when every input is exact; a truncated input
      // leaves nothing to recover.
      if (attempt >= 4 || !c.is_exact() || !d.is_exact() || !r1.is_exact() ||
          !r2.is_exact())
        throw;
      budget *= 2;
    }
  }
}

std::array<Elem, 6> o_expressions(const Elem& c, const Elem& d,
                                  const Elem& r1, const Elem& r2,
                                  const GammaParams& gp) {
  const FieldContext& ctx = c.ctx();
  Res half = ctx.rhalf();
  Elem xpy = gp.x + gp.y;
  Elem xmy = gp.x - gp.y;
  Elem q1 = r2 * r1.inv();                 // r2/r1
  Elem q2 = (r1 * r2.conj()).inv();        // 1/(r1 conj(r2))
  Elem q3 = r1.conj() * r2;                // conj(r1) r2
  Elem q4 = r1.conj() * r2.conj().inv();   // conj(r1)/conj(r2)
  Elem halfe = Elem::one(ctx).scale(half);
  Elem a = q1 * xpy;      // recurring first summand base
  Elem b2 = xmy * q2;
  Elem b3 = xmy * q3;
  std::array<Elem, 6> o{Elem::zero(ctx), Elem::zero(ctx), Elem::zero(ctx),
                        Elem::zero(ctx), Elem::zero(ctx), Elem::zero(ctx)};
  o[0] = a * (-c - halfe) + b2.scale(half);
  o[1] = a * (-c + halfe) + b2.scale(half);
  o[2] = a * (-d - halfe) + b3.scale(half);
  o[3] = a * (-d + halfe) + b3.scale(half);
  Elem cd2 = (a * c * d).scale(Res{2, 0});
  o[4] = cd2 - d * (a + b2) - b3 * c + (b3 + q4 * xpy).scale(half);
  o[5] = cd2 - c * (a + b3) - b2 * d + (q4 * xpy + b2).scale(half);
  return o;
}

}  // namespace kappa
