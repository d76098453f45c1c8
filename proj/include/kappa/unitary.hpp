#pragma once

#include <array>
#include <vector>

#include "kappa/localfield.hpp"

// The U(2)xU(2) -> U(4) symmetric space in explicit matrices: the hermitian
// form J (antidiagonal ones), the involution theta, the -1-eigenspace
// g1(F) with its six free coordinates, the diagonal elements gamma and
// their stable transfer gamma_stc = Ad(B)gamma, the Iwasawa coordinates
// (unipotent radical, Levi, cocharacter), and the direct matrix-level
// integrality test for Ad(u^-1)Ad(m^-1)gamma.

namespace kappa {

class MatE {
 public:
  explicit MatE(const FieldContext& ctx);  // zero matrix
  static MatE identity(const FieldContext& ctx);

  Elem& at(int i, int j) { return e_[size_t(4 * i + j)]; }
  const Elem& at(int i, int j) const { return e_[size_t(4 * i + j)]; }

  MatE operator+(const MatE& o) const;
  MatE operator-(const MatE& o) const;
  MatE operator*(const MatE& o) const;
  MatE operator-() const;
  bool operator==(const MatE& o) const;  // exact entries only

  MatE conj() const;            // entrywise Galois conjugate
  MatE transpose() const;
  MatE scale(const Elem& a) const;
  Elem trace() const;

  // Sum of principal k x k minors (k = 1..4); k = 4 is the determinant.
  // Characteristic polynomial coefficients up to sign, computed without
  // division so they stay valid in small residue characteristic.
  Elem principal_minor_sum(int k) const;

  const FieldContext& ctx() const { return *ctx_; }

 private:
  const FieldContext* ctx_;
  std::vector<Elem> e_;  // row-major, 16 entries
};

MatE form_J(const FieldContext& ctx);       // antidiagonal ones
MatE theta_mat(const FieldContext& ctx);    // antidiag(1,-1,-1,1)
MatE theta(const MatE& g);                  // conjugation by theta_mat

// Membership tests.  False is certified (a known-nonzero defect digit);
// true means no defect is visible at the known precision, which is exact
// whenever the inputs are exact.
bool is_in_U4(const MatE& g);   // gbar^t J g = J
bool is_in_u4(const MatE& x);   // -J xbar^t J = x

struct GammaParams {
  Elem x, y;     // in F, nonzero, x != +-y
  long V_m = 0;  // v(x - y)
  long V_p = 0;  // v(x + y)
  bool nearly_singular() const { return V_p > V_m; }
};

// Validates regularity: x, y nonzero elements of F with x != +-y.
GammaParams make_gamma_params(const Elem& x, const Elem& y);

struct SymmetricSpaceElem {
  Elem x11, x22;  // F
  Elem x12, x13;  // E
  Elem x14, x23;  // Fdelta
  MatE mat;
};

// Assembles the g1(F) matrix pattern from its six free coordinates.
SymmetricSpaceElem assemble_g1(const Elem& x11, const Elem& x22,
                               const Elem& x12, const Elem& x13,
                               const Elem& x14, const Elem& x23);
// Checks the pattern and the coordinate subfield constraints.
bool is_in_g1F(const MatE& X);

SymmetricSpaceElem make_gamma(const GammaParams& gp);      // diag(x,y,-y,-x)
SymmetricSpaceElem make_gamma_stc(const GammaParams& gp);  // Ad(B)gamma

// The class-transfer matrix B and its inverse, hard-coded; B * B_inv is
// asserted to be the identity.
MatE transfer_B(const FieldContext& ctx);
MatE transfer_B_inv(const FieldContext& ctx);

MatE unipotent(const Elem& c, const Elem& d);       // c, d in Fdelta
MatE levi(const Elem& r1, const Elem& r2);          // r1, r2 in E^x
MatE cochar(const Elem& r);                         // r in F^x

// The unit-determinant integer matrix mixing the six g1 coordinates into
// the six tractable combinations; row i of coordinate_combinations equals
// (A v)_i, conjugated for i in {1, 2, 4} (0-based).
extern const int coord_mix[6][6];
long coord_mix_det();

// [Y11, Y12, Y13, Y14, Y22, Y23] read off a g1 matrix.
std::array<Elem, 6> g1_coordinates(const MatE& Y);
std::array<Elem, 6> coordinate_combinations(const MatE& Y);

// Y = Ad(u(c,d)^-1) Ad(m(r1,r2)^-1) gamma, computed at the precision the
// inputs allow.  (c,d) here are the raw u-matrix coordinates.
MatE conjugated_element(const Elem& c, const Elem& d, const Elem& r1,
                        const Elem& r2, const MatE& gamma);

// True iff all six coordinates of Y are integral.  Inverse truncation is
// retried at doubled precision until the verdict is decidable.
bool direct_integrality(const Elem& c, const Elem& d, const Elem& r1,
                        const Elem& r2, const SymmetricSpaceElem& gamma);

// Closed forms of the six coordinate combinations, written in the rotated
// unipotent coordinates: the (c,d) accepted here correspond to the raw
// matrix coordinates ((d-c)/2, (c+d)/2), and with that pullback the i-th
// entry equals coordinate_combinations(conjugated_element(...))[i].
std::array<Elem, 6> o_expressions(const Elem& c, const Elem& d,
                                  const Elem& r1, const Elem& r2,
                                  const GammaParams& gp);

}  // namespace kappa
