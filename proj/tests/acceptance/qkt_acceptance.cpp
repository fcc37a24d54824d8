// One pass/fail line per acceptance criterion.
//   qkt_acceptance [--only N] [--cli path]
// Exit code 0 iff every selected criterion passes.

#include "qkt/suite.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace qkt;

namespace {

constexpr double kFlatTol = 1e-8;
constexpr double kExistenceTol = 1e-4;
constexpr double kFirstLevelTol = 1e-5;
constexpr double kAgreementTol = 1e-8;
constexpr double kAlgebraicTol = 1e-10;
constexpr double kCurvatureTol = 1e-3;
constexpr double kNegativeControlMin = 1e-2;
constexpr double kOrderRatioLo = 3.0;
constexpr double kOrderRatioHi = 5.0;

std::string cli_path;

ManifoldSpec flat(int n) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Flat;
  s.n = n;
  return s;
}

ManifoldSpec conformal(int n, const std::string& f) {
  ManifoldSpec s;
  s.kind = ManifoldKind::ConformalFlat;
  s.n = n;
  s.f = f;
  return s;
}

ManifoldSpec dim4(const std::array<std::string, 4>& t, std::optional<std::string> f = std::nullopt) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Dim4Torsion;
  s.t = t;
  s.f = std::move(f);
  return s;
}

std::string key(const ManifoldSpec& s) {
  std::string k = to_string(s.kind) + "/" + std::to_string(s.n) + "/" + s.f.value_or("") + "/";
  if (s.t)
    for (const auto& c : *s.t) k += c + ",";
  char buf[64];
  std::snprintf(buf, sizeof buf, "/%g/%g/%g", s.scheme.h, s.scheme.h2, s.perturb_j2_degrees);
  return k + buf;
}

// Full-suite reports are shared between criteria.
const VerificationReport& full_report(const ManifoldSpec& s) {
  static std::map<std::string, VerificationReport> cache;
  const std::string k = key(s);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, run_suite(s, SuiteSelection{})).first;
  return it->second;
}

double residual(const VerificationReport& r, const std::string& id) {
  const IdentityRecord* rec = r.find(id);
  if (!rec) return std::nan("");
  return rec->max_residual;
}

struct Check {
  std::string what;
  double value;
  double limit;
  bool pass;
};

Check at_most(std::string what, double value, double limit) {
  return {std::move(what), value, limit, std::isfinite(value) && value <= limit};
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void add(const Check& c) {
    pass = pass && c.pass;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%s=%.3e%s%.0e", detail.empty() ? "" : "; ", c.what.c_str(), c.value,
                  c.pass ? "<=" : "!<=", c.limit);
    detail += buf;
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

double max_over_ids(const VerificationReport& r) {
  double m = 0.0;
  for (const IdentityRecord& rec : r.results) m = std::isnan(rec.max_residual) ? rec.max_residual : std::max(m, rec.max_residual);
  return m;
}

Outcome criterion1() {
  Outcome o;
  for (int n : {1, 2}) {
    const ManifoldSpec s = flat(n);
    const BuiltManifold m = build_manifold(s);
    double conn = 0.0, torsion = 0.0;
    for (const Point& p : m.points) {
      conn = std::max(conn, max_abs_diff(m.structure.connection_at(p), levi_civita(m.structure.data.patch, p, s.scheme.h)));
      torsion = std::max(torsion, m.structure.torsion_at(p).max_abs());
    }
    const VerificationReport& r = full_report(s);
    const std::string tag = "n=" + std::to_string(n) + " ";
    o.add(at_most(tag + "|G-G^g|", conn, kFlatTol));
    o.add(at_most(tag + "|T|", torsion, kFlatTol));
    o.add(at_most(tag + "|rho|", r.classification["ricci_form_max"]["max"].get<double>(), kFlatTol));
    o.add(at_most(tag + "max suite residual", max_over_ids(r), kFlatTol));
    if (!r.all_pass()) o.note(tag + "suite has failing identities"), o.pass = false;
  }
  return o;
}

const std::vector<std::string> kCriterion2Factors = {"exp(x1)", "1+x1^2+x3^2"};

Outcome criterion2() {
  Outcome o;
  for (const std::string& f : kCriterion2Factors) {
    const VerificationReport& r = full_report(conformal(2, f));
    o.add(at_most(f + " existence", residual(r, "existence_condition"), kExistenceTol));
    o.add(at_most(f + " alpha-agreement", residual(r, "torsion_structure_agreement"), kFirstLevelTol));
    o.add(at_most(f + " metricity", residual(r, "metricity"), kFirstLevelTol));
    o.add(at_most(f + " purity", residual(r, "torsion_type"), kFirstLevelTol));
    o.add(at_most(f + " nablaJ", residual(r, "quaternionic_connection"), kFirstLevelTol));
  }
  return o;
}

std::vector<ManifoldSpec> all_structures() {
  return {flat(1),
          flat(2),
          conformal(1, "exp(x1)"),
          conformal(2, "exp(x1)"),
          conformal(2, "1+x1^2+x3^2"),
          dim4({"0.7", "0", "0", "0"}),
          dim4({"sin(x2)", "0", "0", "0"}),
          dim4({"-1", "0", "0", "0"}, "exp(x1)"),
          dim4({"(-2*x1)/(1+x1^2+x3^2)", "0", "(-2*x3)/(1+x1^2+x3^2)", "0"}, "1+x1^2+x3^2"),
          [] {
            ManifoldSpec s;
            s.kind = ManifoldKind::HopfLocal;
            return s;
          }()};
}

Outcome criterion3() {
  Outcome o;
  double worst = 0.0;
  for (const ManifoldSpec& s : all_structures()) {
    const VerificationReport& r = full_report(s);
    worst = std::max({worst, residual(r, "torsion_one_form_agreement"), residual(r, "rescaled_torsion_one_form_agreement")});
  }
  o.add(at_most("max_{structures} |J_a t_a - J_b t_b|", worst, kAgreementTol));
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (int n : {1, 2}) {
    const ManifoldSpec s = conformal(n, "exp(x1)");
    const VerificationReport& r = full_report(s);
    const std::string tag = "n=" + std::to_string(n) + " ";
    double lee_dev = std::max({residual(r, "conformal_dc_kaehler"), residual(r, "conformal_lee_forms"),
                          residual(r, "conformal_cross_lee_forms")});
    double sp1_dev = std::max(residual(r, "conformal_A_invariance"), residual(r, "conformal_sp1_forms"));
    if (n >= 2) sp1_dev = std::max(sp1_dev, residual(r, "conformal_K_forms"));
    o.add(at_most(tag + "lee", lee_dev, kFirstLevelTol));
    o.add(at_most(tag + "sp1", sp1_dev, kFirstLevelTol));
    o.add(at_most(tag + "torsion", residual(r, "conformal_torsion"), kFirstLevelTol));
    o.add(at_most(tag + "t", residual(r, "conformal_torsion_one_form"), kFirstLevelTol));
    // Direct: the rescaled flat structure has t = -(2n+1) dx1.
    const BuiltManifold m = build_manifold(s);
    double dev = 0.0;
    for (const Point& p : m.points) {
      Tensor expected(m.structure.dim(), 1);
      expected(0) = -(2.0 * n + 1.0);
      dev = std::max(dev, max_abs_diff(torsion_one_forms(m.structure, p).t, expected));
    }
    o.add(at_most(tag + "|t + (2n+1)dx1|", dev, kFirstLevelTol));
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  const VerificationReport& r = full_report(dim4({"sin(x2)", "0", "0", "0"}));
  o.add(at_most("hodge_complex", residual(r, "hodge_complex_identity"), kAlgebraicTol));
  o.add(at_most("T=*t", residual(r, "torsion_hodge_dual"), kAlgebraicTol));
  o.add(at_most("*dT+delta t", residual(r, "codifferential_duality"), kFirstLevelTol));
  o.add(at_most("Ric-Ric^T+deltaT", residual(r, "ricci_skew_codifferential"), kCurvatureTol));
  o.add(at_most("skew_ricci", residual(r, "skew_ricci_formula"), kCurvatureTol));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> ids = {
      {"commutator", "curvature_commutator"}, {"ricci_form", "ricci_form_sp1"}, {"dT", "torsion_exterior_derivative"},
      {"bianchi", "first_bianchi"},         {"lc_relation", "lc_curvature_relation"},
      {"pair_difference", "curvature_pair_difference"}, {"mixed_trace", "mixed_ricci_trace"}};
  const std::vector<std::pair<std::string, ManifoldSpec>> specs = {
      {"cf2 exp(x1)", conformal(2, "exp(x1)")},
      {"cf2 1+x1^2+x3^2", conformal(2, "1+x1^2+x3^2")},
      {"dim4 t=0.7dx1", dim4({"0.7", "0", "0", "0"})}};
  for (const auto& [name, s] : specs) {
    const VerificationReport& r = full_report(s);
    double worst = 0.0;
    std::string which = "all zero";
    for (const auto& [label, id] : ids) {
      const double v = residual(r, id);
      if (!(v <= worst)) worst = v, which = label;
    }
    if (s.n >= 2) {
      const double v = residual(r, "single_ricci_trace");
      if (!(v <= worst)) worst = v, which = "single_trace";
    }
    o.add(at_most(name + " max(" + which + ")", worst, kCurvatureTol));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const std::string& t1 : {std::string("0.7"), std::string("sin(x2)")}) {
    const VerificationReport& r = full_report(dim4({t1, "0", "0", "0"}));
    o.add(at_most("t=" + t1 + "dx1 K", residual(r, "k_tensor_formula"), kCurvatureTol));
    o.add(at_most("t=" + t1 + "dx1 Ric^g", residual(r, "lc_ricci_formula"), kCurvatureTol));
    o.add(at_most("t=" + t1 + "dx1 SymRic^W+SymK", residual(r, "weyl_ricci_sp1"), kCurvatureTol));
  }
  return o;
}

// max over sample points of 2(n-1) |d ln f|_inf with analytic derivatives: on
// f·(flat) the HKT defect th_a - J_b th_{a,c} equals 2(n-1) d ln f.
double hkt_defect_oracle(const std::string& f, int n, const std::vector<Point>& pts) {
  double m = 0.0;
  for (const Point& p : pts) {
    Vector dl = Vector::Zero(p.size());
    if (f == "exp(x1)") {
      dl(0) = 1.0;
    } else {
      const double fv = 1.0 + p(0) * p(0) + p(2) * p(2);
      dl(0) = 2.0 * p(0) / fv;
      dl(2) = 2.0 * p(2) / fv;
    }
    m = std::max(m, 2.0 * (n - 1) * dl.cwiseAbs().maxCoeff());
  }
  return m;
}

Outcome criterion8() {
  Outcome o;
  for (const ManifoldSpec& s : {conformal(1, "exp(x1)"), conformal(2, "exp(x1)"), conformal(2, "1+x1^2+x3^2")}) {
    const VerificationReport& r = full_report(s);
    const bool integrable = r.classification["integrable"].get<bool>();
    o.pass = o.pass && integrable;
    o.note("n=" + std::to_string(s.n) + " " + *s.f + " integrable=" + (integrable ? "true" : "false"));
    if (s.n < 2) continue;
    const bool hkt = r.classification["hkt"].get<bool>();
    o.pass = o.pass && !hkt;
    o.note(std::string("hkt=") + (hkt ? "true" : "false"));
    const double reported = r.classification["hkt_residual"].get<double>();
    const double oracle = hkt_defect_oracle(*s.f, s.n, build_manifold(s).points);
    o.add(at_most("|hkt_residual-oracle|", std::abs(reported - oracle), kFirstLevelTol));
    char buf[160];
    std::snprintf(buf, sizeof buf, "reported %.6f, printed-index variant %.6f", reported,
                  r.classification["hkt_residual_swapped_cross_indices"].get<double>());
    o.note(buf);
  }
  int hkt_count = 0;
  double worst_rho = 0.0;
  for (const ManifoldSpec& s : all_structures()) {
    const VerificationReport& r = full_report(s);
    if (!r.classification["hkt"].get<bool>()) continue;
    ++hkt_count;
    worst_rho = std::max(worst_rho, r.classification["ricci_form_max"]["max"].get<double>());
  }
  o.add(at_most("HKT=>max|rho| over " + std::to_string(hkt_count) + " HKT structures", worst_rho, kCurvatureTol));
  if (hkt_count < 3) o.pass = false, o.note("expected flat n=1,2 and a non-flat HKT structure");
  return o;
}

Outcome criterion9() {
  Outcome o;
  ManifoldSpec s = conformal(2, "exp(x1)");
  s.perturb_j2_degrees = 5.0;
  const VerificationReport r = run_suite(s, SuiteSelection{});
  const double e = residual(r, "existence_condition");
  const bool above = e > kNegativeControlMin;
  o.pass = above && !r.all_pass();
  char buf[160];
  std::snprintf(buf, sizeof buf, "existence residual=%.3e%s%.0e; report all_pass=%s", e, above ? ">" : "!>",
                kNegativeControlMin, r.all_pass() ? "true" : "false");
  o.note(buf);
  if (!cli_path.empty()) {
    const std::string cmd = "\"" + cli_path +
                            "\" verify --manifold conformal_flat --n 2 --f 'exp(x1)' --points 20 --seed 42 "
                            "--perturb-j2 5 --quiet";
    const int status = std::system(cmd.c_str());
    const bool nonzero = status != 0;
    o.pass = o.pass && nonzero;
    o.note(std::string("cli exit ") + (nonzero ? "nonzero" : "zero"));
  } else {
    o.pass = false;
    o.note("cli path unknown");
  }
  return o;
}

// Residuals that criterion 2 gates on, for one factor.
std::vector<std::pair<std::string, double>> criterion2_residuals(double h) {
  ManifoldSpec s = conformal(2, "1+x1^2+x3^2");
  s.scheme.h = h;
  const VerificationReport r = run_suite(s, SuiteSelection::only(Suite::Connection));
  std::vector<std::pair<std::string, double>> out;
  for (const char* id : {"existence_condition", "torsion_structure_agreement", "metricity", "torsion_type",
                         "quaternionic_connection"})
    out.emplace_back(id, residual(r, id));
  return out;
}

Outcome criterion10() {
  Outcome o;
  const auto coarse = criterion2_residuals(1e-4);
  const auto fine = criterion2_residuals(5e-5);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double ratio = coarse[i].second / fine[i].second;
    const bool ok = std::isfinite(ratio) && ratio >= kOrderRatioLo && ratio <= kOrderRatioHi;
    o.pass = o.pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %.2e/%.2e=%.3g%s", coarse[i].first.c_str(), coarse[i].second, fine[i].second,
                  ratio, ok ? "" : "(out of [3,5])");
    o.note(buf);
  }
  // A truncation-dominated quantity for comparison: FD gradient of ln f
  // against the analytic one.
  const Expression f = parse_expression("1+x1^2+x3^2+x1^3*x3");
  const ScalarField lf = [f](const Point& p) { return std::log(f(p)); };
  Point p(8);
  p << 0.3, -0.1, 0.2, 0.05, -0.2, 0.1, 0.0, 0.15;
  auto err = [&](double h) {
    const double fv = f(p);
    Vector exact = Vector::Zero(8);
    exact(0) = (2 * p(0) + 3 * p(0) * p(0) * p(2)) / fv;
    exact(2) = (2 * p(2) + p(0) * p(0) * p(0)) / fv;
    return (gradient(lf, p, h, Box::cube(8, -1, 1)) - exact).cwiseAbs().maxCoeff();
  };
  char buf[160];
  std::snprintf(buf, sizeof buf, "reference FD gradient error ratio at h=1e-2: %.3g", err(1e-2) / err(5e-3));
  o.note(buf);
  return o;
}

Outcome criterion11() {
  Outcome o;
  bool same = true;
  for (const std::string& f : kCriterion2Factors) {
    const ManifoldSpec s = conformal(2, f);
    const VerificationReport a = run_suite(s, SuiteSelection::only(Suite::Connection));
    const VerificationReport b = run_suite(s, SuiteSelection::only(Suite::Connection));
    const VerificationReport c = run_suite(s, SuiteSelection::only(Suite::Connection), RunOptions{3});
    for (std::size_t i = 0; i < a.results.size(); ++i) {
      const double x = a.results[i].max_residual;
      same = same && x == b.results[i].max_residual && x == c.results[i].max_residual;
    }
    same = same && a.body() == b.body() && a.body() == c.body();
  }
  o.pass = same;
  o.note(same ? "residuals and report bodies identical across two runs and 1 vs 3 threads" : "runs differ");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (a == "--cli" && i + 1 < argc)
      cli_path = argv[++i];
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"flat baseline", criterion1},
      {"existence and torsion on conformal_flat n=2", criterion2},
      {"J_a t_a agreement", criterion3},
      {"conformal laws", criterion4},
      {"dimension-4 torsion structure", criterion5},
      {"curvature identities", criterion6},
      {"dimension-4 Einstein-like and Weyl", criterion7},
      {"classification coherence", criterion8},
      {"negative control", criterion9},
      {"FD order", criterion10},
      {"determinism", criterion11},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::printf("criterion %2d %s  %s: %s\n", number, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
