// Command line driver: computes the antidiagonal orbital mass difference
// two independent ways (closed form and measure enumeration) and reports
// every comparison it makes.  Modes:
//
//   verify       one (q, V_m, V_p) point, full per-case breakdown
//   sweep        a grid of points, one table row per point per realization
//   oracle-dump  raw per-shell masses for one point
//   selftest     deterministic invariant suites plus a fault injection
//
// Exit code 0 means every comparison matched, 1 means a mismatch, 2 means
// the request itself was invalid.  OMP_NUM_THREADS controls the thread
// count of the parallel enumeration; no other environment is read.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kappa/closedform.hpp"
#include "kappa/conditions.hpp"
#include "kappa/measure.hpp"
#include "kappa/unitary.hpp"
#include "selftest.hpp"

using json = nlohmann::ordered_json;
using namespace kappa;

namespace {

struct Range {
  long lo = 0;
  long hi = 0;
};

Range parse_range(const std::string& s) {
  auto pos = s.find("..");
  if (pos == std::string::npos) {
    long v = std::stol(s);
    return {v, v};
  }
  Range r{std::stol(s.substr(0, pos)), std::stol(s.substr(pos + 2))};
  if (r.hi < r.lo) throw std::invalid_argument("empty range " + s);
  return r;
}

bool is_odd_prime(long q) {
  if (q < 3 || q % 2 == 0) return false;
  for (long d = 3; d * d <= q; d += 2)
    if (q % d == 0) return false;
  return true;
}

json rat_json(const ExactMeasure& m) {
  return json{{"num", m.get_num().get_str()}, {"den", m.get_den().get_str()}};
}

std::string fmt_digit(Res d) {
  std::ostringstream os;
  if (d.b == 0) {
    os << int(d.a);
  } else if (d.a == 0) {
    os << int(d.b) << "d";
  } else {
    os << int(d.a) << "+" << int(d.b) << "d";
  }
  return os.str();
}

// Compact exact-series rendering: pi^v(d0|d1|...), digits a, bd or a+bd.
std::string fmt_elem(const Elem& e) {
  if (e.is_zero()) return "0";
  long v = e.valuation();
  std::vector<Res> digs;
  long last = 0;
  for (long k = v; k < v + 24; ++k) {
    Res d = e.coeff(k);
    digs.push_back(d);
    if (d.a != 0 || d.b != 0) last = k - v;
  }
  std::ostringstream os;
  os << "pi^" << v << "(";
  for (long i = 0; i <= last; ++i) {
    if (i) os << "|";
    os << fmt_digit(digs[size_t(i)]);
  }
  os << ")";
  return os.str();
}

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t point_seed(std::uint64_t seed, long q, long vm, long vp, long choice) {
  std::uint64_t z = seed;
  z = mix(z ^ std::uint64_t(q));
  z = mix(z ^ std::uint64_t(vm + 64));
  z = mix(z ^ std::uint64_t(vp + 64));
  z = mix(z ^ std::uint64_t(choice));
  return z;
}

Elem rand_unit_f(const FieldContext& ctx, std::mt19937_64& rng) {
  for (;;) {
    std::vector<Res> digs;
    for (int i = 0; i < 3; ++i)
      digs.push_back(Res{std::int16_t(rng() % std::uint64_t(ctx.p)), 0});
    if (digs[0].a != 0) return Elem::from_coeffs(ctx, 0, digs);
  }
}

// x - y = pi^vm u1 and x + y = pi^vp u2 for fresh units u1, u2 in F.
GammaParams realize(const FieldContext& ctx, long vm, long vp,
                    std::mt19937_64& rng) {
  for (;;) {
    Elem xm = Elem::pi_pow(ctx, vm) * rand_unit_f(ctx, rng);
    Elem xp = Elem::pi_pow(ctx, vp) * rand_unit_f(ctx, rng);
    Elem x = (xp + xm).scale(ctx.rhalf());
    Elem y = (xp - xm).scale(ctx.rhalf());
    if (x.is_zero() || y.is_zero()) continue;
    return make_gamma_params(x, y);
  }
}

json shell_json(const ShellRecord& r) {
  json j;
  j["v_s"] = r.shell.v_s;
  j["v_n"] = r.shell.v_n;
  j["v_c"] = r.shell.v_c;
  j["v_d"] = r.shell.v_d;
  j["h"] = r.shell.h();
  j["tag"] = r.tag;
  j["mass"] = rat_json(r.mass);
  return j;
}

constexpr CaseFormulaId kDisplays[] = {
    CaseFormulaId::posOne,   CaseFormulaId::posTwo,  CaseFormulaId::posThree,
    CaseFormulaId::posFour,  CaseFormulaId::posFive, CaseFormulaId::negOne,
    CaseFormulaId::negTwo,   CaseFormulaId::negThree, CaseFormulaId::negFour,
    CaseFormulaId::negFive,
};

struct CaseEntry {
  CaseFormulaId id;
  long h;
  CaseSlice slice;
};

std::vector<CaseEntry> case_plan(long vm) {
  std::vector<CaseEntry> out;
  for (CaseFormulaId id : kDisplays) {
    CaseSlice s = case_slice(id, vm);
    for (long h = s.h_lo; h <= s.h_hi; ++h) out.push_back({id, h, s});
  }
  return out;
}

const char* side_str(Side s) { return s == Side::one_zero ? "(1,0)" : "(0,1)"; }
const char* split_str(CSplit s) {
  switch (s) {
    case CSplit::all: return "all";
    case CSplit::c_nonneg: return "c>=0";
    case CSplit::c_neg: return "c<0";
    case CSplit::d_nonneg: return "d>=0";
    default: return "d<0";
  }
}

struct PointReport {
  json rec;
  bool all_ok = true;
  ExactMeasure oracle;
};

// One realized parameter point: head comparison, optional per-case table,
// shell dump on mismatch.
PointReport run_point(long q, long vm, long vp, std::uint64_t seed, long choice,
                      bool with_cases, ExecMode mode) {
  FieldContext ctx = FieldContext::make(int(q));
  std::mt19937_64 rng(point_seed(seed, q, vm, vp, choice));
  GammaParams gp = realize(ctx, vm, vp, rng);

  auto t0 = std::chrono::steady_clock::now();
  std::vector<ShellRecord> sink;
  ExactMeasure oracle = kappa_orbital_oracle(gp, mode, &sink);
  ExactMeasure closed = kappa_orbital_closed(vm, vp, q);
  bool head = closed == oracle;

  PointReport out;
  out.oracle = oracle;
  out.all_ok = head;
  json& rec = out.rec;
  rec["q"] = q;
  rec["nu"] = ctx.nu;
  rec["x"] = fmt_elem(gp.x);
  rec["y"] = fmt_elem(gp.y);
  rec["V_m"] = vm;
  rec["V_p"] = vp;
  rec["closed_form"] = rat_json(closed);
  rec["oracle"] = rat_json(oracle);

  if (with_cases) {
    json cases = json::array();
    for (const CaseEntry& e : case_plan(vm)) {
      ExactMeasure cf = case_formula(e.id, e.h, vm, vp).eval(q);
      ExactMeasure om =
          case_measure_at(gp, e.slice.side, e.slice.cls, e.h, e.slice.split, mode);
      bool ok = cf == om;
      out.all_ok = out.all_ok && ok;
      json c;
      c["case"] = case_formula_name(e.id);
      c["side"] = side_str(e.slice.side);
      c["class"] =
          e.slice.cls == SummandClass::e6_only ? "e6-only" : "all-summands";
      c["split"] = split_str(e.slice.split);
      c["h"] = e.h;
      c["closed"] = rat_json(cf);
      c["oracle"] = rat_json(om);
      c["match"] = ok;
      cases.push_back(std::move(c));
    }
    rec["cases"] = std::move(cases);
  }

  rec["match"] = head;
  std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  rec["seconds"] = dt.count();

  if (!head) {
    json shells = json::array();
    for (const ShellRecord& r : sink) shells.push_back(shell_json(r));
    rec["shells"] = std::move(shells);
  }
  return out;
}

std::string csv_row(const json& rec) {
  std::ostringstream os;
  os << rec["q"] << "," << rec["nu"] << "," << rec["x"].get<std::string>() << ","
     << rec["y"].get<std::string>() << "," << rec["V_m"] << "," << rec["V_p"]
     << "," << rec["closed_form"]["num"].get<std::string>() << ","
     << rec["closed_form"]["den"].get<std::string>() << ","
     << rec["oracle"]["num"].get<std::string>() << ","
     << rec["oracle"]["den"].get<std::string>() << ","
     << (rec["match"].get<bool>() ? 1 : 0) << "," << rec["seconds"] << "\n";
  return os.str();
}

constexpr const char* kCsvHeader =
    "q,nu,x,y,V_m,V_p,closed_num,closed_den,oracle_num,oracle_den,match,"
    "seconds\n";

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::invalid_argument("cannot open output file " + out_path);
  f << text;
}

int mode_verify(long q, Range vm, Range vp, long choices, std::uint64_t seed,
                const std::string& format, const std::string& out_path) {
  if (vm.lo != vm.hi || vp.lo != vp.hi)
    throw std::invalid_argument("verify takes single --vm and --vp values");
  // reject parameters outside the closed form's range up front
  kappa_orbital_closed(vm.lo, vp.lo, q);

  bool all_ok = true;
  std::vector<PointReport> reports;
  for (long c = 0; c < choices; ++c) {
    reports.push_back(
        run_point(q, vm.lo, vp.lo, seed, c, true, ExecMode::parallel));
    all_ok = all_ok && reports.back().all_ok;
  }

  std::ostringstream os;
  if (format == "csv") {
    os << kCsvHeader;
    for (const PointReport& r : reports) os << csv_row(r.rec);
  } else if (choices == 1) {
    os << reports[0].rec.dump(2) << "\n";
  } else {
    json arr = json::array();
    for (PointReport& r : reports) arr.push_back(std::move(r.rec));
    os << arr.dump(2) << "\n";
  }
  emit(os.str(), out_path);
  return all_ok ? 0 : 1;
}

int mode_sweep(long q, Range vm, Range vp, long choices, std::uint64_t seed,
               const std::string& format, const std::string& out_path) {
  struct Job {
    long vm, vp, choice;
  };
  std::vector<Job> jobs;
  for (long a = vm.lo; a <= vm.hi; ++a)
    for (long b = vp.lo; b <= vp.hi; ++b) {
      if (a < 0 || b <= a) continue;  // outside the closed form's range
      for (long c = 0; c < choices; ++c) jobs.push_back({a, b, c});
    }

  std::vector<PointReport> reports(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < long(jobs.size()); ++i)
    reports[size_t(i)] = run_point(q, jobs[size_t(i)].vm, jobs[size_t(i)].vp,
                                   seed, jobs[size_t(i)].choice, false,
                                   ExecMode::serial);

  // realizations of the same point must agree on the enumerated mass
  for (size_t i = 0; i + 1 < jobs.size(); ++i)
    for (size_t j = i + 1; j < jobs.size(); ++j)
      if (jobs[i].vm == jobs[j].vm && jobs[i].vp == jobs[j].vp &&
          reports[i].oracle != reports[j].oracle)
        throw std::logic_error("oracle mass depends on the unit realization");

  bool all_ok = true;
  std::ostringstream os;
  if (format == "csv") os << kCsvHeader;
  json arr = json::array();
  for (PointReport& r : reports) {
    all_ok = all_ok && r.all_ok;
    if (format == "csv") os << csv_row(r.rec);
    else arr.push_back(std::move(r.rec));
  }
  if (format != "csv") os << arr.dump(2) << "\n";
  emit(os.str(), out_path);
  return all_ok ? 0 : 1;
}

int mode_oracle_dump(long q, Range vm, Range vp, std::uint64_t seed,
                     const std::string& format, const std::string& out_path) {
  if (vm.lo != vm.hi || vp.lo != vp.hi)
    throw std::invalid_argument("oracle-dump takes single --vm and --vp values");
  FieldContext ctx = FieldContext::make(int(q));
  std::mt19937_64 rng(point_seed(seed, q, vm.lo, vp.lo, 0));
  GammaParams gp = realize(ctx, vm.lo, vp.lo, rng);

  std::vector<ShellRecord> sink;
  json rec;
  rec["q"] = q;
  rec["nu"] = ctx.nu;
  rec["x"] = fmt_elem(gp.x);
  rec["y"] = fmt_elem(gp.y);
  rec["V_m"] = gp.V_m;
  rec["V_p"] = gp.V_p;
  if (gp.V_m >= 0 && gp.V_p > gp.V_m) {
    ExactMeasure k = kappa_orbital_oracle(gp, ExecMode::parallel, &sink);
    rec["oracle"] = rat_json(k);
  } else {
    // outside the difference's domain, dump the two orbitals separately
    std::vector<ShellRecord> plain_sink, stc_sink;
    ExactMeasure mp = orbital_oracle(gp, Variant::plain, ExecMode::parallel,
                                     &plain_sink);
    ExactMeasure ms =
        orbital_oracle(gp, Variant::stc, ExecMode::parallel, &stc_sink);
    rec["plain"] = rat_json(mp);
    rec["stc"] = rat_json(ms);
    for (ShellRecord& r : plain_sink) {
      r.tag = "integral-plain";
      sink.push_back(std::move(r));
    }
    for (ShellRecord& r : stc_sink) {
      r.tag = "integral-stc";
      sink.push_back(std::move(r));
    }
  }

  std::ostringstream os;
  if (format == "csv") {
    os << "v_s,v_n,v_c,v_d,h,tag,num,den\n";
    for (const ShellRecord& r : sink)
      os << r.shell.v_s << "," << r.shell.v_n << "," << r.shell.v_c << ","
         << r.shell.v_d << "," << r.shell.h() << "," << r.tag << ","
         << r.mass.get_num().get_str() << "," << r.mass.get_den().get_str()
         << "\n";
  } else {
    json shells = json::array();
    for (const ShellRecord& r : sink) shells.push_back(shell_json(r));
    rec["shells"] = std::move(shells);
    os << rec.dump(2) << "\n";
  }
  emit(os.str(), out_path);
  return 0;
}

int mode_selftest(std::uint64_t seed, int depth, int margin,
                  const std::string& out_path) {
  std::vector<selftest::SuiteResult> results =
      selftest::run_all(seed, depth, margin);
  results.push_back(selftest::run_fault_injection(seed));

  std::ostringstream os;
  os << "selftest seed=" << seed << " depth=" << depth << " margin=" << margin
     << "\n";
  long passed = 0;
  for (const selftest::SuiteResult& r : results) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": checks=" << r.checks
       << " " << r.note << "\n";
    if (r.pass) ++passed;
  }
  os << "result: " << passed << "/" << results.size() << " suites passed\n";
  emit(os.str(), out_path);
  return passed == long(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "antidiagonal orbital mass difference: exact closed form against the "
      "brute force measure enumeration"};
  app.set_config("--config", "", "flat key=value configuration file");

  long q = 3;
  std::string vm_s = "0", vp_s = "1";
  long choices = 1;
  int depth = 2, margin = 2;
  std::uint64_t seed = 0;
  std::string mode = "verify", format = "json", out_path;

  app.add_option("--q", q, "residue field size, an odd prime")
      ->capture_default_str();
  app.add_option("--vm", vm_s, "valuation of x - y, either N or A..B")
      ->capture_default_str();
  app.add_option("--vp", vp_s, "valuation of x + y, either N or A..B")
      ->capture_default_str();
  app.add_option("--choices", choices, "unit realizations per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--depth", depth,
                 "digit depth of the exhaustive class enumeration (selftest)")
      ->check(CLI::Range(1, 3))
      ->capture_default_str();
  app.add_option("--margin", margin,
                 "extra width of the bounded search boxes (selftest)")
      ->check(CLI::Range(0, 6))
      ->capture_default_str();
  app.add_option("--seed", seed, "seed for the unit realizations")
      ->capture_default_str();
  app.add_option("--mode", mode, "verify | sweep | oracle-dump | selftest")
      ->check(CLI::IsMember({"verify", "sweep", "oracle-dump", "selftest"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!is_odd_prime(q)) throw std::invalid_argument("--q must be an odd prime");
    Range vm = parse_range(vm_s);
    Range vp = parse_range(vp_s);
    if (mode == "verify") return mode_verify(q, vm, vp, choices, seed, format, out_path);
    if (mode == "sweep") return mode_sweep(q, vm, vp, choices, seed, format, out_path);
    if (mode == "oracle-dump") return mode_oracle_dump(q, vm, vp, seed, format, out_path);
    return mode_selftest(seed, depth, margin, out_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
