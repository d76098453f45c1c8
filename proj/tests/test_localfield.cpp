#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "kappa/localfield.hpp"

using namespace kappa;

namespace {

Elem rand_elem(const FieldContext& ctx, std::mt19937& rng, bool in_F = false,
               bool in_Fdelta = false) {
  std::uniform_int_distribution<int> vdist(-6, 6), len(1, 8), digit(0, ctx.p - 1);
  std::vector<Res> cf(size_t(len(rng)));
  for (Res& c : cf) {
    c.a = in_Fdelta ? 0 : int16_t(digit(rng));
    c.b = in_F ? 0 : int16_t(digit(rng));
  }
  return Elem::from_coeffs(ctx, vdist(rng), std::move(cf));
}

}  // namespace

TEST_CASE("context construction") {
  FieldContext c3 = FieldContext::make(3);
  CHECK(c3.p == 3);
  CHECK(c3.nu == 2);  // smallest nonresidue mod 3
  FieldContext c5 = FieldContext::make(5);
  CHECK(c5.nu == 2);
  FieldContext c7 = FieldContext::make(7);
  CHECK(c7.nu == 3);
  CHECK_THROWS_AS(FieldContext::make(4), std::invalid_argument);
  CHECK_THROWS_AS(FieldContext(3, 1), std::invalid_argument);  // 1 is a square
}

TEST_CASE("addition and cancellation") {
  FieldContext ctx = FieldContext::make(3);
  Elem pi = Elem::pi_pow(ctx, 1);
  Elem two_pi = pi + pi;
  CHECK(two_pi.valuation() == 1);
  CHECK(two_pi.coeff(1) == Res{2, 0});

  Elem z = pi - pi;
  CHECK(z.is_zero());
  CHECK(z.is_integral());  // zero is integral

  Elem one_plus_pi = Elem::one(ctx) + pi;
  Elem lifted = one_plus_pi + Elem::from_int(ctx, -1);
  CHECK(lifted.valuation() == 1);  // cancellation raises the valuation
}

TEST_CASE("multiplication, inverse, defining relation") {
  FieldContext ctx = FieldContext::make(3);
  Elem pi = Elem::pi_pow(ctx, 1);
  CHECK((pi * pi).valuation() == 2);

  Elem d = Elem::delta(ctx);
  Elem dd = d * d;
  CHECK(dd == Elem::from_int(ctx, ctx.nu));

  Elem g = (Elem::one(ctx) + pi).inv();
  // 1 - pi + pi^2 - ... truncated at the precision budget
  CHECK(g.valuation() == 0);
  CHECK(g.coeff(0) == Res{1, 0});
  CHECK(g.coeff(1) == Res{2, 0});
  CHECK(g.coeff(2) == Res{1, 0});
  CHECK(!g.is_exact());
  // and (1+pi)*g is 1 on the known window
  Elem check = (Elem::one(ctx) + pi) * g;
  CHECK(check.valuation() == 0);
  for (long e = 1; e < check.known_until(); ++e) CHECK(check.coeff(e).is_zero());

  CHECK_THROWS_AS(Elem::zero(ctx).inv(), std::domain_error);
}

TEST_CASE("conjugation is the coefficientwise Frobenius") {
  FieldContext ctx = FieldContext::make(3);
  Elem pi = Elem::pi_pow(ctx, 1);
  CHECK(pi.conj() == pi);
  Elem d = Elem::delta(ctx);
  Elem x = d * Elem::pi_pow(ctx, 2) + Elem::pi_pow(ctx, 3);
  Elem xc = x.conj();
  CHECK(xc == -d * Elem::pi_pow(ctx, 2) + Elem::pi_pow(ctx, 3));

  std::mt19937 rng(42);
  for (int i = 0; i < 200; ++i) {
    Elem r = rand_elem(ctx, rng);
    CHECK(r.conj().conj() == r);
  }
}

TEST_CASE("norm lands in F and is multiplicative") {
  FieldContext ctx = FieldContext::make(3);
  Elem d = Elem::delta(ctx);
  // N(delta) = -nu; at q=3, nu=2 that is 1
  CHECK(d.norm() == Elem::from_int(ctx, -ctx.nu));
  CHECK(d.norm() == Elem::one(ctx));
  Elem pi = Elem::pi_pow(ctx, 1);
  CHECK(pi.norm() == pi * pi);

  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    Elem x = rand_elem(ctx, rng), y = rand_elem(ctx, rng);
    CHECK(x.norm().is_in_F());
    CHECK((x * y).norm() == x.norm() * y.norm());
    if (!x.is_zero()) CHECK(x.norm().valuation() == 2 * x.valuation());
  }
}

TEST_CASE("valuation and integrality") {
  FieldContext ctx = FieldContext::make(3);
  Elem u = Elem::one(ctx) + Elem::delta(ctx) * Elem::pi_pow(ctx, 2);
  CHECK((u * Elem::pi_pow(ctx, 3)).valuation() == 3);
  CHECK(Elem::delta(ctx).valuation() == 0);
  CHECK(!Elem::pi_pow(ctx, -1).is_integral());
  CHECK(Elem::pi_pow(ctx, 0).is_integral());
}

TEST_CASE("insufficient precision is an error, not a guess") {
  FieldContext ctx = FieldContext::make(3);
  // An element known only to satisfy v >= -1 cannot answer is_integral.
  Elem w = Elem::window(ctx, -1, {}, /*src=*/1).truncated(-1);
  CHECK(w.valuation_at_least(-1) == Tri::True);
  CHECK(w.valuation_at_least(0) == Tri::Unknown);
  CHECK_THROWS_AS(w.is_integral(), insufficient_precision);
  try {
    w.is_integral();
  } catch (const insufficient_precision& e) {
    CHECK(e.sources() == 1);
  }

  // Caller-driven retry: the same value rebuilt with more digits decides.
  Elem better = Elem::window(ctx, -1, {Res{0, 0}, Res{1, 0}}, 1);
  CHECK(better.valuation() == 0);  // leading zero digit was trimmed
  CHECK(better.is_integral());
}

TEST_CASE("window arithmetic tracks precision and sources") {
  FieldContext ctx = FieldContext::make(3);
  Elem a = Elem::window(ctx, 0, {Res{1, 0}, Res{2, 0}}, 1);  // known mod pi^2
  Elem b = Elem::window(ctx, 1, {Res{1, 0}}, 2);             // known mod pi^2
  Elem s = a + b;
  CHECK(s.known_until() == 2);
  CHECK(s.src() == 3);
  Elem p = a * b;  // v = 1, known digits limited by both windows
  CHECK(p.valuation() == 1);
  CHECK(p.known_until() == 2);  // b's unknown pi^2 digit already interferes
  // exact * window keeps the window's relative precision
  Elem e = Elem::pi_pow(ctx, 5) * a;
  CHECK(e.valuation() == 5);
  CHECK(e.known_until() == 7);
}

TEST_CASE("field axioms on random samples") {
  FieldContext ctx = FieldContext::make(3);
  std::mt19937 rng(2024);
  for (int i = 0; i < 500; ++i) {
    Elem x = rand_elem(ctx, rng), y = rand_elem(ctx, rng), z = rand_elem(ctx, rng);
    CHECK((x + y) + z == x + (y + z));
    CHECK(x + y == y + x);
    CHECK((x * y) * z == x * (y * z));
    CHECK(x * y == y * x);
    CHECK(x * (y + z) == x * y + x * z);
  }
}

TEST_CASE("conj is a ring involution fixing exactly F") {
  FieldContext ctx = FieldContext::make(3);
  std::mt19937 rng(99);
  for (int i = 0; i < 10000; ++i) {
    Elem x = rand_elem(ctx, rng), y = rand_elem(ctx, rng);
    CHECK((x + y).conj() == x.conj() + y.conj());
    CHECK((x * y).conj() == x.conj() * y.conj());
    bool fixed = x.conj() == x;
    CHECK(fixed == x.is_in_F());
  }
  // and the trace-zero line is exactly the -1 eigenspace
  for (int i = 0; i < 1000; ++i) {
    Elem x = rand_elem(ctx, rng, false, true);
    CHECK(x.is_in_Fdelta());
    CHECK(x.conj() == -x);
  }
}

TEST_CASE("integrality split for ax + b") {
  FieldContext ctx = FieldContext::make(3);
  Elem d = Elem::delta(ctx);
  Elem pi = Elem::pi_pow(ctx, 1);

  // ax = delta integral, b integral: implication live and true
  CHECK(check_residue_split(Elem::pi_pow(ctx, -1), Elem::one(ctx), d * pi));
  // ax + b non-integral: vacuous
  CHECK(check_residue_split(Elem::pi_pow(ctx, -1), Elem::pi_pow(ctx, -1), d));

  std::mt19937 rng(5);
  for (int i = 0; i < 10000; ++i) {
    Elem a = rand_elem(ctx, rng, true);
    Elem b = rand_elem(ctx, rng, true);
    Elem x = rand_elem(ctx, rng, false, true);
    CHECK(check_residue_split(a, b, x));
  }
}

TEST_CASE("unit class enumeration") {
  FieldContext ctx = FieldContext::make(3);
  auto f1 = enumerate_units(ctx, 1, Subfield::F);
  CHECK(f1.size() == 2);
  auto e2 = enumerate_units(ctx, 2, Subfield::E);
  CHECK(e2.size() == 72);
  auto fd2 = enumerate_units(ctx, 2, Subfield::Fdelta);
  CHECK(fd2.size() == 6);

  mpq_class total = 0;
  for (const auto& u : e2) {
    total += u.mass;
    CHECK(u.rep.valuation() == 0);
  }
  CHECK(total == 1);
  for (const auto& u : fd2) CHECK(u.rep.is_in_Fdelta());
}

TEST_CASE("units of F are norms from E") {
  // Digit lifting: for a sampled unit u of o_F, solve N(z) = u mod pi^K.
  FieldContext ctx = FieldContext::make(3);
  std::mt19937 rng(31);
  const int K = 6;
  std::uniform_int_distribution<int> digit(0, ctx.p - 1), lead(1, ctx.p - 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Res> ucf(static_cast<size_t>(K));
    ucf[0] = Res{int16_t(lead(rng)), 0};
    for (int i = 1; i < K; ++i) ucf[size_t(i)] = Res{int16_t(digit(rng)), 0};
    Elem u = Elem::from_coeffs(ctx, 0, ucf);

    // level 0: brute-force a residue with a^2 - nu b^2 = u_0
    Elem z = Elem::zero(ctx);
    bool found = false;
    for (int a = 0; a < ctx.p && !found; ++a)
      for (int b = 0; b < ctx.p && !found; ++b) {
        Res r{int16_t(a), int16_t(b)};
        if (r.is_zero()) continue;
        if (ctx.rmul(r, ctx.rconj(r)) == u.coeff(0)) {
          z = Elem::monomial(ctx, r, 0);
          found = true;
        }
      }
    REQUIRE(found);
    // lift digit by digit
    for (int k = 1; k < K; ++k) {
      Elem diff = u - z.norm();
      if (diff.is_zero() || diff.valuation() > k) continue;
      REQUIRE(diff.valuation() == k);
      bool lifted = false;
      for (int a = 0; a < ctx.p && !lifted; ++a)
        for (int b = 0; b < ctx.p && !lifted; ++b) {
          Elem cand = z + Elem::monomial(ctx, Res{int16_t(a), int16_t(b)}, k);
          Elem d2 = u - cand.norm();
          if (d2.is_zero() || d2.valuation() > k) {
            z = cand;
            lifted = true;
          }
        }
      REQUIRE(lifted);
    }
    Elem rem = u - z.norm();
    CHECK((rem.is_zero() || rem.valuation() >= K));
  }
}
