#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kappa/conditions.hpp"

// Brute-force side of the verification: exact Haar masses of the integrality
// loci, computed by valuation-shell decomposition and adaptive digit
// enumeration.  Everything on the exact path is an mpq_class; no floating
// point enters except in the Monte Carlo confidence intervals.
//
// Normalization: U(o) and M(o) have unit volume, o-delta has unit volume.
// Consequently a unit shell {v(r) = k} of E^x or F^x carries mass 1 and the
// Fdelta shell {v(c) = k} carries mass q^{-k}(1 - q^{-1}).  The Levi integral
// is pushed forward to the pair (s, n) = (r2/r1, N(r1)): the conditions
// depend on nothing else, s stays Haar-uniform, and the norm map pushes the
// unit Haar measure to the uniform measure on F^x units, so each even shell
// of n carries mass 1.  raw_orbital_exact and monte_carlo_check recompute
// measures in the unreduced coordinates to validate exactly that step.

namespace kappa {

using ExactMeasure = mpq_class;

// q^e as an exact rational, e of either sign.
ExactMeasure q_power(long q, long e);

// One enumeration variable of the digit DFS.  val is the valuation of the
// shell (for FdeltaTail, the threshold T of the single cell {v >= T}).
// src is this variable's bit in the Elem provenance masks.
enum class VarKind : uint8_t { UnitE, UnitF, Fdelta, FdeltaTail };
struct VarSpec {
  VarKind kind;
  long val;
  uint8_t src;
};

struct Verdict {
  Tri t = Tri::Unknown;
  uint8_t blame = 0;  // union of var src bits that starve the verdict
};

// Exact mass of {point : pred = True} inside the product cell described by
// vars.  The predicate sees one window per variable, carrying exactly the
// digits fixed so far, and must be monotone: a True/False verdict never
// flips when more digits are revealed.  Undecided branches refine the
// shallowest blamed variable; a branch that stays undecided past any
// plausible decision depth aborts instead of truncating.
ExactMeasure cell_measure(const FieldContext& ctx,
                          const std::vector<VarSpec>& vars,
                          const std::function<Verdict(const std::vector<Elem>&)>& pred);

struct Shell {
  long v_s, v_n, v_c, v_d;
  long h() const { return v_s + v_n; }
};

using CondPredicate =
    std::function<Verdict(const Elem& c, const Elem& d, const Elem& s, const Elem& n)>;

// cell_measure specialised to the (c, d, s, n) shell: unit shells for s and
// n, Fdelta shells for c and d, masses as in the normalization note above.
ExactMeasure shell_measure(const FieldContext& ctx, const Shell& shell,
                           const CondPredicate& pred);

enum class Side : uint8_t { one_zero, zero_one };
enum class SummandClass : uint8_t { all_summands, e6_only, mixed };
enum class HRegime : uint8_t { extreme, interior };

struct CaseTag {
  Side side;
  SummandClass summand_class;
  HRegime h_regime;
};

// Sub-case filter: the h = V_m ledger splits on v(c), the h = -V_m - 1
// ledger on v(d).
enum class CSplit : uint8_t { all, c_nonneg, c_neg, d_nonneg, d_neg };

enum class ExecMode : uint8_t { serial, parallel };

struct ShellRecord {
  Shell shell;
  std::string tag;
  ExactMeasure mass;
};

// Mass of {(c,d,s,n) : the variant's seven conditions all hold} summed over
// the admissible shells.  Margins of every valuation range are enumerated
// and asserted empty; a nonempty margin shell aborts with a diagnostic.
// Nonzero per-shell masses are appended to *sink when given.
ExactMeasure orbital_oracle(const GammaParams& gp, Variant variant,
                            ExecMode mode = ExecMode::parallel,
                            std::vector<ShellRecord>* sink = nullptr);

// plain minus twisted, computed two independent ways: as a difference of
// full orbital masses and as the (1,0)-minus-(0,1) side assembly.  The two
// routes are asserted equal.  Requires V_m >= 0 and V_p > V_m.
ExactMeasure kappa_orbital_oracle(const GammaParams& gp,
                                  ExecMode mode = ExecMode::parallel,
                                  std::vector<ShellRecord>* sink = nullptr);

// Side masses restricted to one summand class at one h (optionally one
// sub-case), and aggregated over a tag's h-regime.  The class is read off
// the side's own condition system; the other variant only supplies the
// "not integral there" half of the side condition.
ExactMeasure case_measure_at(const GammaParams& gp, Side side, SummandClass cls,
                             long h, CSplit split = CSplit::all,
                             ExecMode mode = ExecMode::parallel);
ExactMeasure case_measure(const GammaParams& gp, const CaseTag& tag,
                          ExecMode mode = ExecMode::parallel);

// The same orbital mass computed without the (s, n) reduction: shells in
// (v(r1), v(r2), v(c), v(d)) with two full E^x unit variables.  Exponentially
// heavier; used to validate the pushforward at small parameters.
ExactMeasure raw_orbital_exact(const GammaParams& gp, Variant variant);

// Uniform sampling in the unreduced coordinates, shell by shell.  Exact
// verdict per sample (digits are drawn lazily until the conditions decide),
// statistical aggregate per run.  Deterministic for a fixed seed.
struct McResult {
  double estimate = 0.0;
  double sigma = 0.0;
  unsigned long samples = 0;
};
McResult monte_carlo_check(const GammaParams& gp, Variant variant,
                           unsigned long samples_per_shell, uint64_t seed);

}  // namespace kappa
