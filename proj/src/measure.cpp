#include "kappa/measure.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#ifdef KAPPA_HAVE_OPENMP
#include <omp.h>
#endif

namespace kappa {

ExactMeasure q_power(long q, long e) {
  mpz_class w;
  mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(q),
                static_cast<unsigned long>(e >= 0 ? e : -e));
  return e >= 0 ? ExactMeasure(w) : ExactMeasure(mpz_class(1), w);
}

namespace {

constexpr uint8_t SRC_C = 1, SRC_D = 2, SRC_S = 4, SRC_N = 8;

struct VarState {
  VarSpec spec;
  std::vector<Res> digits;
  int tail_guard = 0;
};

Elem var_window(const FieldContext& ctx, const VarState& v) {
  return Elem::window(ctx, v.spec.val, v.digits, v.spec.src);
}

// Depth-first refinement.  Every node carries the exact mass of its digit
// class; a decided node contributes all of it or none of it, an undecided
// node splits the shallowest variable the verdict blames.
struct Dfs {
  const FieldContext& ctx;
  const std::function<Verdict(const std::vector<Elem>&)>& pred;
  std::vector<VarState> vars;
  std::vector<Elem> win;
  ExactMeasure acc = 0;

  void run(const ExactMeasure& mass) {
    Verdict v = pred(win);
    if (v.t == Tri::True) {
      acc += mass;
      return;
    }
    if (v.t == Tri::False) return;
    int pick = -1;
    size_t best = SIZE_MAX;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (!(v.blame & vars[i].spec.src)) continue;
      if (vars[i].digits.size() < best) {
        best = vars[i].digits.size();
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) throw std::logic_error("cell_measure: undecided verdict with empty blame");
    branch(static_cast<size_t>(pick), mass);
  }

  void branch(size_t i, const ExactMeasure& mass) {
    VarState& vs = vars[i];
    const int p = ctx.p;
    if (vs.digits.size() >= 64)
      throw std::logic_error("cell_measure: digit refinement runaway");
    switch (vs.spec.kind) {
      case VarKind::UnitE:
      case VarKind::UnitF:
      case VarKind::Fdelta: {
        bool lead = vs.digits.empty();
        bool in_F = vs.spec.kind == VarKind::UnitF;
        bool in_Fd = vs.spec.kind == VarKind::Fdelta;
        int count = (in_F || in_Fd) ? (lead ? p - 1 : p)
                                    : (lead ? p * p - 1 : p * p);
        ExactMeasure child = mass / count;
        vs.digits.push_back(Res{0, 0});
        if (in_Fd) {
          for (int b = lead ? 1 : 0; b < p; ++b) {
            vs.digits.back() = Res{0, static_cast<int16_t>(b)};
            win[i] = var_window(ctx, vs);
            run(child);
          }
        } else if (in_F) {
          for (int a = lead ? 1 : 0; a < p; ++a) {
            vs.digits.back() = Res{static_cast<int16_t>(a), 0};
            win[i] = var_window(ctx, vs);
            run(child);
          }
        } else {
          for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b) {
              if (lead && a == 0 && b == 0) continue;
              vs.digits.back() = Res{static_cast<int16_t>(a), static_cast<int16_t>(b)};
              win[i] = var_window(ctx, vs);
              run(child);
            }
        }
        vs.digits.pop_back();
        win[i] = var_window(ctx, vs);
        break;
      }
      case VarKind::FdeltaTail: {
        // {v >= T} splits into q children of equal mass: the q-1 leading
        // digit classes of {v = T} and the deeper tail {v >= T+1}.
        if (vs.tail_guard >= 32)
          throw std::logic_error("cell_measure: tail refinement runaway");
        ExactMeasure child = mass / p;
        VarState save = vs;
        vs.spec.kind = VarKind::Fdelta;
        for (int b = 1; b < p; ++b) {
          vs.digits = {Res{0, static_cast<int16_t>(b)}};
          win[i] = var_window(ctx, vs);
          run(child);
        }
        vs = save;
        vs.spec.val += 1;
        vs.tail_guard += 1;
        win[i] = var_window(ctx, vs);
        run(child);
        vs = save;
        win[i] = var_window(ctx, vs);
        break;
      }
    }
  }
};

ExactMeasure root_mass(long q, const VarSpec& v) {
  switch (v.kind) {
    case VarKind::UnitE:
    case VarKind::UnitF:
      return 1;
    case VarKind::Fdelta:
      return q_power(q, -v.val) - q_power(q, -v.val - 1);
    case VarKind::FdeltaTail:
      return q_power(q, -v.val);
  }
  return 0;
}

}  // namespace

ExactMeasure cell_measure(const FieldContext& ctx, const std::vector<VarSpec>& vars,
                          const std::function<Verdict(const std::vector<Elem>&)>& pred) {
  Dfs dfs{ctx, pred, {}, {}, 0};
  ExactMeasure mass = 1;
  for (const VarSpec& v : vars) {
    dfs.vars.push_back(VarState{v, {}, 0});
    mass *= root_mass(ctx.p, v);
  }
  for (const VarState& v : dfs.vars) dfs.win.push_back(var_window(ctx, v));
  dfs.run(mass);
  return dfs.acc;
}

ExactMeasure shell_measure(const FieldContext& ctx, const Shell& shell,
                           const CondPredicate& pred) {
  std::vector<VarSpec> vars = {{VarKind::Fdelta, shell.v_c, SRC_C},
                               {VarKind::Fdelta, shell.v_d, SRC_D},
                               {VarKind::UnitE, shell.v_s, SRC_S},
                               {VarKind::UnitF, shell.v_n, SRC_N}};
  return cell_measure(ctx, vars, [&](const std::vector<Elem>& w) {
    return pred(w[0], w[1], w[2], w[3]);
  });
}

namespace {

struct View {
  long vlb;
  bool exact;
};

View view_of(const Elem& w) {
  long v = w.valuation_lower_bound();
  return {v, w.known_until() > v};
}

Tri t_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}

Tri t_not(Tri a) {
  if (a == Tri::True) return Tri::False;
  if (a == Tri::False) return Tri::True;
  return Tri::Unknown;
}

Verdict v_and(const Verdict& a, const Verdict& b) {
  if (a.t == Tri::False || b.t == Tri::False) return {Tri::False, 0};
  if (a.t == Tri::True && b.t == Tri::True) return {Tri::True, 0};
  uint8_t blame = 0;
  if (a.t == Tri::Unknown) blame |= a.blame;
  if (b.t == Tri::Unknown) blame |= b.blame;
  return {Tri::Unknown, blame};
}

Verdict v_not(const Verdict& a) { return {t_not(a.t), a.blame}; }

// v(x) + base >= 0 for a variable known at least to vlb, exactly when a
// leading digit is pinned.
Tri geq(long base, const View& v, uint8_t src, uint8_t& blame) {
  if (base + v.vlb >= 0) return Tri::True;
  if (v.exact) return Tri::False;
  blame |= src;
  return Tri::Unknown;
}

Tri geq2(long base, const View& a, uint8_t sa, const View& b, uint8_t sb,
         uint8_t& blame) {
  if (base + a.vlb + b.vlb >= 0) return Tri::True;
  if (a.exact && b.exact) return Tri::False;
  if (!a.exact) blame |= sa;
  if (!b.exact) blame |= sb;
  return Tri::Unknown;
}

// Shared per-gamma constants of the cleared condition system.
struct GammaCtx {
  const GammaParams& gp;
  Elem xpy, xmy;
  Res four;
};

GammaCtx gamma_ctx(const GammaParams& gp) {
  return {gp, gp.x + gp.y, gp.x - gp.y,
          Res{static_cast<int16_t>(4 % gp.x.ctx().p), 0}};
}

// All seven sums integral, for the variant with twist shift t.  v_s and v_n
// are exact shell data; c and d may still be tail cells.  E1, E4, E5 are
// decided by the shell alone; E2, E3 and the four summand levels need at
// most the valuations of c and d; the sums E6 and E7 fall back to cleared
// window forms (s-bar E6 and n s-bar E7 are polynomial in the digits) when
// the summand levels do not already decide them.
Verdict int_verdict(const GammaCtx& g, int t, long v_s, long v_n, const Elem& c,
                    const Elem& d, const Elem& s, const Elem& n) {
  const GammaParams& gp = g.gp;
  long h = v_s + v_n;
  if (v_s + gp.V_p < 0) return {Tri::False, 0};
  if (gp.V_m - h - t < 0) return {Tri::False, 0};
  if (gp.V_m + h + t < 0) return {Tri::False, 0};

  uint8_t blame = 0;
  View vc = view_of(c), vd = view_of(d);
  Tri e2 = geq(v_s + gp.V_p, vc, SRC_C, blame);
  if (e2 == Tri::False) return {Tri::False, 0};
  Tri e3 = geq(v_s + gp.V_p, vd, SRC_D, blame);
  if (e3 == Tri::False) return {Tri::False, 0};

  Tri s6a = geq2(v_s + gp.V_p, vc, SRC_C, vd, SRC_D, blame);
  Tri e6;
  if (gp.V_p - v_s >= 0 && s6a == Tri::True) {
    e6 = Tri::True;
  } else {
    Elem f6 = (s.norm() * c * d * g.xpy).scale(g.four) + g.xpy;
    e6 = f6.valuation_at_least(v_s);
    if (e6 == Tri::Unknown) {
      uint8_t m = f6.src();
      blame |= m ? m : uint8_t(0xF);
    }
  }
  if (e6 == Tri::False) return {Tri::False, 0};

  Tri s7a = geq(gp.V_m + h + t, vc, SRC_C, blame);
  Tri s7b = geq(gp.V_m - h - t, vd, SRC_D, blame);
  Tri e7;
  if (s7a == Tri::True && s7b == Tri::True) {
    e7 = Tri::True;
  } else {
    Elem f7 = g.xmy * (c * (n * n).shift(2 * t) * s.norm() + d);
    e7 = f7.valuation_at_least(h + t);
    if (e7 == Tri::Unknown) {
      uint8_t m = f7.src();
      blame |= m ? m : uint8_t(0xF);
    }
  }
  if (e7 == Tri::False) return {Tri::False, 0};

  if (e2 == Tri::True && e3 == Tri::True && e6 == Tri::True && e7 == Tri::True)
    return {Tri::True, 0};
  return {Tri::Unknown, blame};
}

// Summand-class refinement of int_verdict.
Verdict class_verdict(const GammaCtx& g, int t, SummandClass cls, long v_s,
                      long v_n, const Elem& c, const Elem& d, const Elem& s,
                      const Elem& n) {
  Verdict base = int_verdict(g, t, v_s, v_n, c, d, s, n);
  if (base.t == Tri::False) return base;
  const GammaParams& gp = g.gp;
  long h = v_s + v_n;
  uint8_t blame = 0;
  View vc = view_of(c), vd = view_of(d);
  Tri a6 = geq2(v_s + gp.V_p, vc, SRC_C, vd, SRC_D, blame);
  Tri b6 = gp.V_p - v_s >= 0 ? Tri::True : Tri::False;
  Tri a7 = geq(gp.V_m + h + t, vc, SRC_C, blame);
  Tri b7 = geq(gp.V_m - h - t, vd, SRC_D, blame);
  Tri pat = Tri::Unknown;
  switch (cls) {
    case SummandClass::all_summands:
      pat = t_and(t_and(a6, b6), t_and(a7, b7));
      break;
    case SummandClass::e6_only:
      pat = t_and(t_and(a6, b6), t_not(t_and(a7, b7)));
      break;
    case SummandClass::mixed:
      pat = t_not(t_and(a6, b6));
      break;
  }
  return v_and(base, Verdict{pat, pat == Tri::Unknown ? blame : uint8_t(0)});
}

// Side condition: integral for the side's own variant, not integral for the
// other one; optionally restricted to a summand class of the own variant.
Verdict side_verdict(const GammaCtx& g, Side side, const SummandClass* cls,
                     long v_s, long v_n, const Elem& c, const Elem& d,
                     const Elem& s, const Elem& n) {
  int own = side == Side::one_zero ? 0 : 1;
  Verdict a = cls ? class_verdict(g, own, *cls, v_s, v_n, c, d, s, n)
                  : int_verdict(g, own, v_s, v_n, c, d, s, n);
  if (a.t == Tri::False) return a;
  Verdict b = int_verdict(g, 1 - own, v_s, v_n, c, d, s, n);
  return v_and(a, v_not(b));
}

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
long ceil_div(long a, long b) { return -floor_div(-a, b); }

// Enumeration domain.  Core bands per variant t:
//   h in [-V_m - t, V_m - t]                        (E4 and E5)
//   v_n in [h - max(V_p, V_m + t), h + V_p]         (E1; E6/E7 elimination)
//   v_c, v_d >= -(V_p + max(V_p, V_m + t))          (E2/E3 within the band)
// plus the single tail cell at T = max(V_m, V_p) + 2.  Everything is
// enumerated with a margin of two shells on every finite edge and the
// margin masses are asserted to vanish.
struct Domain {
  std::vector<Shell> shells;
  long tail;  // v_c or v_d equal to this marks the tail cell
};

long max_v(const GammaParams& gp, int t) {
  return std::max(gp.V_p, gp.V_m + t);
}

bool in_core(const GammaParams& gp, int t, const Shell& sh) {
  long h = sh.h();
  long mv = max_v(gp, t);
  return h >= -gp.V_m - t && h <= gp.V_m - t && sh.v_n >= h - mv &&
         sh.v_n <= h + gp.V_p && sh.v_c >= -(gp.V_p + mv) &&
         sh.v_d >= -(gp.V_p + mv);
}

Domain enumerate_domain(const GammaParams& gp, int tmax,
                        const long* fixed_h = nullptr) {
  Domain dom;
  long mv = max_v(gp, tmax);
  dom.tail = std::max(gp.V_m, gp.V_p) + 2;
  long clo = -(gp.V_p + mv) - 2;
  for (long h = -gp.V_m - tmax - 2; h <= gp.V_m + 2; ++h) {
    if (fixed_h && h != *fixed_h) continue;
    long nlo = h - mv - 4, nhi = h + gp.V_p + 4;
    if (nlo % 2 != 0) ++nlo;
    for (long vn = nlo; vn <= nhi; vn += 2)
      for (long vc = clo; vc <= dom.tail; ++vc)
        for (long vd = clo; vd <= dom.tail; ++vd)
          dom.shells.push_back(Shell{h - vn, vn, vc, vd});
  }
  return dom;
}

using NodePred = std::function<Verdict(const Elem& c, const Elem& d,
                                       const Elem& s, const Elem& n)>;

ExactMeasure measure_shell(const FieldContext& ctx, const Shell& sh, long tail,
                           const NodePred& pred) {
  std::vector<VarSpec> vars = {
      {sh.v_c == tail ? VarKind::FdeltaTail : VarKind::Fdelta, sh.v_c, SRC_C},
      {sh.v_d == tail ? VarKind::FdeltaTail : VarKind::Fdelta, sh.v_d, SRC_D},
      {VarKind::UnitE, sh.v_s, SRC_S},
      {VarKind::UnitF, sh.v_n, SRC_N}};
  return cell_measure(ctx, vars, [&](const std::vector<Elem>& w) {
    return pred(w[0], w[1], w[2], w[3]);
  });
}

std::vector<ExactMeasure> run_shells(size_t n,
                                     const std::function<ExactMeasure(size_t)>& ev,
                                     ExecMode mode) {
  std::vector<ExactMeasure> out(n);
#ifdef KAPPA_HAVE_OPENMP
  if (mode == ExecMode::parallel) {
    std::string err;
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      try {
        out[static_cast<size_t>(i)] = ev(static_cast<size_t>(i));
      } catch (const std::exception& e) {
#pragma omp critical
        {
          failed = true;
          err = e.what();
        }
      }
    }
    if (failed) throw std::logic_error(err);
    return out;
  }
#else
  (void)mode;
#endif
  for (size_t i = 0; i < n; ++i) out[i] = ev(i);
  return out;
}

std::string shell_str(const Shell& sh) {
  std::ostringstream os;
  os << "(v_s=" << sh.v_s << ", v_n=" << sh.v_n << ", v_c=" << sh.v_c
     << ", v_d=" << sh.v_d << ")";
  return os.str();
}

ExactMeasure sum_domain(const GammaParams& gp, const Domain& dom,
                        const NodePred& pred,
                        const std::function<bool(const Shell&)>& core,
                        ExecMode mode, const char* tag,
                        std::vector<ShellRecord>* sink) {
  const FieldContext& ctx = gp.x.ctx();
  auto res = run_shells(
      dom.shells.size(),
      [&](size_t i) { return measure_shell(ctx, dom.shells[i], dom.tail, pred); },
      mode);
  ExactMeasure total = 0;
  for (size_t i = 0; i < dom.shells.size(); ++i) {
    if (res[i] == 0) continue;
    if (!core(dom.shells[i]))
      throw std::logic_error(std::string("margin shell nonempty: ") + tag +
                             " at " + shell_str(dom.shells[i]));
    total += res[i];
    if (sink) sink->push_back(ShellRecord{dom.shells[i], tag, res[i]});
  }
  return total;
}

}  // namespace

ExactMeasure orbital_oracle(const GammaParams& gp, Variant variant,
                            ExecMode mode, std::vector<ShellRecord>* sink) {
  int t = variant == Variant::stc ? 1 : 0;
  GammaCtx g = gamma_ctx(gp);
  Domain dom = enumerate_domain(gp, t);
  auto pred = [&](const Elem& c, const Elem& d, const Elem& s, const Elem& n) {
    long v_s = s.valuation_lower_bound(), v_n = n.valuation_lower_bound();
    return int_verdict(g, t, v_s, v_n, c, d, s, n);
  };
  auto core = [&](const Shell& sh) { return in_core(gp, t, sh); };
  const char* tag = t ? "integral-stc" : "integral-plain";
  return sum_domain(gp, dom, pred, core, mode, tag, sink);
}

ExactMeasure kappa_orbital_oracle(const GammaParams& gp, ExecMode mode,
                                  std::vector<ShellRecord>* sink) {
  if (gp.V_m < 0) throw std::invalid_argument("kappa_orbital_oracle: V_m < 0");
  if (!gp.nearly_singular())
    throw std::invalid_argument("kappa_orbital_oracle: V_p <= V_m");
  ExactMeasure route_a =
      orbital_oracle(gp, Variant::plain, mode, sink) -
      orbital_oracle(gp, Variant::stc, mode, sink);

  GammaCtx g = gamma_ctx(gp);
  Domain dom = enumerate_domain(gp, 1);
  auto core = [&](const Shell& sh) {
    return in_core(gp, 0, sh) || in_core(gp, 1, sh);
  };
  ExactMeasure side10 = 0, side01 = 0;
  for (int si = 0; si < 2; ++si) {
    Side side = si == 0 ? Side::one_zero : Side::zero_one;
    auto pred = [&](const Elem& c, const Elem& d, const Elem& s, const Elem& n) {
      return side_verdict(g, side, nullptr, s.valuation_lower_bound(),
                          n.valuation_lower_bound(), c, d, s, n);
    };
    const char* tag = si == 0 ? "side-(1,0)" : "side-(0,1)";
    ExactMeasure m = sum_domain(gp, dom, pred, core, mode, tag, sink);
    (si == 0 ? side10 : side01) = m;
  }
  ExactMeasure route_b = side10 - side01;
  if (route_a != route_b) {
    std::ostringstream os;
    os << "kappa_orbital_oracle: route disagreement, difference-of-orbitals = "
       << route_a.get_str() << ", side assembly = " << route_b.get_str();
    throw std::logic_error(os.str());
  }
  return route_a;
}

ExactMeasure case_measure_at(const GammaParams& gp, Side side, SummandClass cls,
                             long h, CSplit split, ExecMode mode) {
  if (gp.V_m < 0) throw std::invalid_argument("case_measure_at: V_m < 0");
  if (!gp.nearly_singular())
    throw std::invalid_argument("case_measure_at: V_p <= V_m");
  GammaCtx g = gamma_ctx(gp);
  Domain dom = enumerate_domain(gp, 1, &h);
  auto keep = [&](const Shell& sh) {
    switch (split) {
      case CSplit::all: return true;
      case CSplit::c_nonneg: return sh.v_c >= 0;
      case CSplit::c_neg: return sh.v_c < 0;
      case CSplit::d_nonneg: return sh.v_d >= 0;
      case CSplit::d_neg: return sh.v_d < 0;
    }
    return true;
  };
  Domain filtered;
  filtered.tail = dom.tail;
  for (const Shell& sh : dom.shells)
    if (keep(sh)) filtered.shells.push_back(sh);
  auto pred = [&](const Elem& c, const Elem& d, const Elem& s, const Elem& n) {
    return side_verdict(g, side, &cls, s.valuation_lower_bound(),
                        n.valuation_lower_bound(), c, d, s, n);
  };
  auto core = [&](const Shell& sh) {
    return in_core(gp, 0, sh) || in_core(gp, 1, sh);
  };
  return sum_domain(gp, filtered, pred, core, mode, "case", nullptr);
}

ExactMeasure case_measure(const GammaParams& gp, const CaseTag& tag,
                          ExecMode mode) {
  std::vector<long> hs;
  long extreme = tag.side == Side::one_zero ? gp.V_m : -gp.V_m - 1;
  if (tag.h_regime == HRegime::extreme) {
    hs.push_back(extreme);
  } else {
    for (long h = -gp.V_m; h <= gp.V_m - 1; ++h) hs.push_back(h);
  }
  ExactMeasure total = 0;
  for (long h : hs)
    total += case_measure_at(gp, tag.side, tag.summand_class, h, CSplit::all, mode);
  return total;
}

namespace {

// Unreduced system: two full unit variables r1, r2 instead of (s, n).  Used
// to validate the pushforward.  Same cleared thresholds with
// v_s = v2 - v1, v_n = 2 v1, and
//   f6 = 4 N(r2) c d (x+y) + N(r1)(x+y)          integral iff v >= h
//   f7 = (x-y)(c N(r1) N(r2) pi^{2t} + d)        integral iff v >= h + t
Verdict raw_verdict(const GammaCtx& g, int t, long v1, long v2, const Elem& c,
                    const Elem& d, const Elem& r1, const Elem& r2) {
  const GammaParams& gp = g.gp;
  long v_s = v2 - v1, h = v1 + v2;
  if (v_s + gp.V_p < 0) return {Tri::False, 0};
  if (gp.V_m - h - t < 0) return {Tri::False, 0};
  if (gp.V_m + h + t < 0) return {Tri::False, 0};

  uint8_t blame = 0;
  View vc = view_of(c), vd = view_of(d);
  Tri e2 = geq(v_s + gp.V_p, vc, SRC_C, blame);
  if (e2 == Tri::False) return {Tri::False, 0};
  Tri e3 = geq(v_s + gp.V_p, vd, SRC_D, blame);
  if (e3 == Tri::False) return {Tri::False, 0};

  Tri s6a = geq2(v_s + gp.V_p, vc, SRC_C, vd, SRC_D, blame);
  Tri e6;
  if (gp.V_p - v_s >= 0 && s6a == Tri::True) {
    e6 = Tri::True;
  } else {
    Elem f6 = (r2.norm() * c * d * g.xpy).scale(g.four) + r1.norm() * g.xpy;
    e6 = f6.valuation_at_least(h);
    if (e6 == Tri::Unknown) {
      uint8_t m = f6.src();
      blame |= m ? m : uint8_t(0xF);
    }
  }
  if (e6 == Tri::False) return {Tri::False, 0};

  Tri s7a = geq(gp.V_m + h + t, vc, SRC_C, blame);
  Tri s7b = geq(gp.V_m - h - t, vd, SRC_D, blame);
  Tri e7;
  if (s7a == Tri::True && s7b == Tri::True) {
    e7 = Tri::True;
  } else {
    Elem f7 = g.xmy * (c * (r1.norm() * r2.norm()).shift(2 * t) + d);
    e7 = f7.valuation_at_least(h + t);
    if (e7 == Tri::Unknown) {
      uint8_t m = f7.src();
      blame |= m ? m : uint8_t(0xF);
    }
  }
  if (e7 == Tri::False) return {Tri::False, 0};

  if (e2 == Tri::True && e3 == Tri::True && e6 == Tri::True && e7 == Tri::True)
    return {Tri::True, 0};
  return {Tri::Unknown, blame};
}

struct RawShell {
  long v1, v2, v_c, v_d;
};

std::vector<RawShell> raw_domain(const GammaParams& gp, int t, long* tail_out) {
  long mv = max_v(gp, t);
  long tail = std::max(gp.V_m, gp.V_p) + 2;
  long clo = -(gp.V_p + mv) - 2;
  std::vector<RawShell> out;
  for (long h = -gp.V_m - t - 2; h <= gp.V_m + 2; ++h) {
    long lo = ceil_div(h - mv, 2) - 1, hi = floor_div(h + gp.V_p, 2) + 1;
    for (long v1 = lo; v1 <= hi; ++v1)
      for (long vc = clo; vc <= tail; ++vc)
        for (long vd = clo; vd <= tail; ++vd)
          out.push_back(RawShell{v1, h - v1, vc, vd});
  }
  *tail_out = tail;
  return out;
}

}  // namespace

ExactMeasure raw_orbital_exact(const GammaParams& gp, Variant variant) {
  const FieldContext& ctx = gp.x.ctx();
  int t = variant == Variant::stc ? 1 : 0;
  GammaCtx g = gamma_ctx(gp);
  long tail = 0;
  std::vector<RawShell> shells = raw_domain(gp, t, &tail);
  ExactMeasure total = 0;
  for (const RawShell& rs : shells) {
    std::vector<VarSpec> vars = {
        {rs.v_c == tail ? VarKind::FdeltaTail : VarKind::Fdelta, rs.v_c, SRC_C},
        {rs.v_d == tail ? VarKind::FdeltaTail : VarKind::Fdelta, rs.v_d, SRC_D},
        {VarKind::UnitE, rs.v1, SRC_S},
        {VarKind::UnitE, rs.v2, SRC_N}};
    ExactMeasure m = cell_measure(ctx, vars, [&](const std::vector<Elem>& w) {
      return raw_verdict(g, t, rs.v1, rs.v2, w[0], w[1], w[2], w[3]);
    });
    if (m != 0) {
      Shell sh{rs.v2 - rs.v1, 2 * rs.v1, rs.v_c, rs.v_d};
      if (!in_core(gp, t, sh))
        throw std::logic_error("raw_orbital_exact: margin shell nonempty at " +
                               shell_str(sh));
      total += m;
    }
  }
  return total;
}

McResult monte_carlo_check(const GammaParams& gp, Variant variant,
                           unsigned long samples_per_shell, uint64_t seed) {
  const FieldContext& ctx = gp.x.ctx();
  const int p = ctx.p;
  int t = variant == Variant::stc ? 1 : 0;
  GammaCtx g = gamma_ctx(gp);
  long tail = 0;
  std::vector<RawShell> shells = raw_domain(gp, t, &tail);
  double est = 0, var = 0;
  McResult r;
  for (size_t idx = 0; idx < shells.size(); ++idx) {
    const RawShell& rs = shells[idx];
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
    std::uniform_int_distribution<int> digit(0, p - 1);
    // Samples are digit vectors; a window over the current digits decides
    // most points at once and undecided ones grow more digits.  Tail cells
    // draw from the full ball, so their leading digits may vanish.
    auto fill = [&](std::vector<Res>& cf, size_t count, VarKind kind, bool lead) {
      for (size_t i = 0; i < count; ++i) {
        int a = kind == VarKind::Fdelta ? 0 : digit(rng);
        int b = kind == VarKind::UnitF ? 0 : digit(rng);
        if (lead && cf.empty() && i == 0) {
          while (a == 0 && b == 0) {
            if (kind == VarKind::Fdelta) b = digit(rng);
            else if (kind == VarKind::UnitF) a = digit(rng);
            else { a = digit(rng); b = digit(rng); }
          }
        }
        cf.push_back(Res{static_cast<int16_t>(a), static_cast<int16_t>(b)});
      }
    };
    unsigned long hits = 0;
    for (unsigned long k = 0; k < samples_per_shell; ++k) {
      std::vector<Res> cfc, cfd, cf1, cf2;
      fill(cfc, 8, VarKind::Fdelta, rs.v_c != tail);
      fill(cfd, 8, VarKind::Fdelta, rs.v_d != tail);
      fill(cf1, 8, VarKind::UnitE, true);
      fill(cf2, 8, VarKind::UnitE, true);
      for (int round = 0;; ++round) {
        Elem c = Elem::window(ctx, rs.v_c, cfc, SRC_C);
        Elem d = Elem::window(ctx, rs.v_d, cfd, SRC_D);
        Elem r1 = Elem::window(ctx, rs.v1, cf1, SRC_S);
        Elem r2 = Elem::window(ctx, rs.v2, cf2, SRC_N);
        Verdict v = raw_verdict(g, t, rs.v1, rs.v2, c, d, r1, r2);
        if (v.t == Tri::True) {
          ++hits;
          break;
        }
        if (v.t == Tri::False) break;
        if (round >= 16)
          throw std::logic_error("monte_carlo_check: sample never decided");
        if (v.blame & SRC_C) fill(cfc, 4, VarKind::Fdelta, false);
        if (v.blame & SRC_D) fill(cfd, 4, VarKind::Fdelta, false);
        if (v.blame & SRC_S) fill(cf1, 4, VarKind::UnitE, false);
        if (v.blame & SRC_N) fill(cf2, 4, VarKind::UnitE, false);
      }
    }
    double qd = static_cast<double>(p);
    auto cmass = [&](long v) {
      return v == tail ? std::pow(qd, -static_cast<double>(tail))
                       : std::pow(qd, -static_cast<double>(v)) * (1.0 - 1.0 / qd);
    };
    double mass = cmass(rs.v_c) * cmass(rs.v_d);
    double ph = static_cast<double>(hits) / static_cast<double>(samples_per_shell);
    est += ph * mass;
    var += ph * (1.0 - ph) / static_cast<double>(samples_per_shell) * mass * mass;
    r.samples += samples_per_shell;
  }
  r.estimate = est;
  r.sigma = std::sqrt(var);
  return r;
}

}  // namespace kappa
