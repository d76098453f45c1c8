// Timing comparison of the serial and the OpenMP shell enumeration on a few
// parameter cells.  Both routes must return the same exact mass; the table
// reports wall time per run and the ratio.

#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kappa/measure.hpp"
#include "kappa/unitary.hpp"

using namespace kappa;

namespace {

GammaParams gp_of(const FieldContext& ctx, long vm, long vp) {
  Elem xm = Elem::pi_pow(ctx, vm);
  Elem xp = Elem::pi_pow(ctx, vp);
  Elem x = (xp + xm).scale(ctx.rhalf());
  Elem y = (xp - xm).scale(ctx.rhalf());
  return make_gamma_params(x, y);
}

struct Timed {
  ExactMeasure mass;
  double secs;
};

Timed run(const GammaParams& gp, Variant v, ExecMode m) {
  auto t0 = std::chrono::steady_clock::now();
  ExactMeasure r = orbital_oracle(gp, v, m);
  std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  return {r, dt.count()};
}

}  // namespace

int main() {
  FieldContext ctx = FieldContext::make(3);
  std::printf("%-8s %-7s %12s %12s %8s %14s\n", "cell", "variant", "serial(s)",
              "parallel(s)", "ratio", "mass");
  for (auto [vm, vp] : std::vector<std::pair<long, long>>{{1, 2}, {2, 3}, {2, 4}}) {
    GammaParams gp = gp_of(ctx, vm, vp);
    for (Variant v : {Variant::plain, Variant::stc}) {
      Timed s = run(gp, v, ExecMode::serial);
      Timed p = run(gp, v, ExecMode::parallel);
      if (s.mass != p.mass)
        throw std::logic_error("serial and parallel enumerations disagree");
      std::printf("(%ld,%ld)    %-7s %12.3f %12.3f %8.2f %14s\n", vm, vp,
                  v == Variant::plain ? "plain" : "stc", s.secs, p.secs,
                  p.secs > 0 ? s.secs / p.secs : 0.0,
                  s.mass.get_str().c_str());
    }
  }
  return 0;
}
