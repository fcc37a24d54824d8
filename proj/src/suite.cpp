#include "qkt/suite.hpp"

#include "qkt/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace qkt {

std::string artifact_version() { return "0.1.0"; }

std::string to_string(Suite s) {
  switch (s) {
    case Suite::Connection:
      return "connection";
    case Suite::Conformal:
      return "conformal";
    case Suite::Curvature:
      return "curvature";
    case Suite::Dim4:
      return "dim4";
  }
  return "unknown";
}

bool SuiteSelection::includes(Suite s) const {
  switch (s) {
    case Suite::Connection:
      return connection;
    case Suite::Conformal:
      return conformal;
    case Suite::Curvature:
      return curvature;
    case Suite::Dim4:
      return dim4;
  }
  return false;
}

SuiteSelection SuiteSelection::only(Suite s) {
  SuiteSelection out{false, false, false, false};
  switch (s) {
    case Suite::Connection:
      out.connection = true;
      break;
    case Suite::Conformal:
      out.conformal = true;
      break;
    case Suite::Curvature:
      out.curvature = true;
      break;
    case Suite::Dim4:
      out.dim4 = true;
      break;
  }
  return out;
}

SuiteSelection SuiteSelection::parse(const std::string& text) {
  if (text == "all") return {};
  SuiteSelection out{false, false, false, false};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "connection")
      out.connection = true;
    else if (item == "conformal")
      out.conformal = true;
    else if (item == "curvature")
      out.curvature = true;
    else if (item == "dim4")
      out.dim4 = true;
    else if (item == "all")
      out = {};
    else
      throw DomainError("unknown suite '" + item + "'");
  }
  return out;
}

const std::vector<IdentityInfo>& identity_catalogue() {
  using S = Suite;
  static const std::vector<IdentityInfo> catalogue = {
      {"quaternionic_identities", "J_a^2 = -1, J_1 J_2 = -J_2 J_1 = J_3", S::Connection, 1e-10},
      {"hermitian_metric", "g(J_a X, J_a Y) = g(X,Y)", S::Connection, 1e-10},
      {"kaehler_form_skew", "F_a(X,Y) = g(X, J_a Y) is a 2-form", S::Connection, 1e-10},
      {"existence_condition",
       "(d_a F_a)^+ - (d_b F_b)^+ = 1/2 (K_a ^ F_b - J_b K_b ^ F_a - (K_b - J_a K_a) ^ F_c)", S::Connection, 1e-4},
      {"torsion_structure_agreement", "T = (d_a F_a)^+ - 1/2 (J_a C_a ^ F_c + C_a ^ F_b) for a = 1,2,3",
       S::Connection, 1e-5},
      {"torsion_skew", "g(T(X,Y),Z) totally skew", S::Connection, 1e-10},
      {"metricity", "nabla g = 0", S::Connection, 1e-5},
      {"torsion_type", "T^{0,2}_a = 0, a = 1,2,3", S::Connection, 1e-5},
      {"quaternionic_connection", "nabla J_a = -w_b J_c + w_c J_b", S::Connection, 1e-5},
      {"torsion_one_form_agreement", "J_1 t_1 = J_2 t_2 = J_3 t_3", S::Connection, 1e-8},
      {"sp1_forms_lee_formula", "w_b = 1/2 J_b (th_c - th_b + th_a/(1-n)) + th_{a,c}/(2(1-n))", S::Connection,
       1e-5},
      {"cross_lee_diagonal", "th_{a,a} = th_a", S::Connection, 1e-5},
      {"cross_lee_antisymmetry", "J_b th_{a,c} = -J_c th_{a,b}", S::Connection, 1e-5},
      {"lee_form_relation",
       "(n^2+n) th_a - n th_b - n^2 th_c + J_c th_{b,a} + n J_a th_{c,b} - (n+1) J_b th_{a,c} = 0", S::Connection,
       1e-5},
      {"lee_form_relation_dim4", "th_a = J_b th_{a,c} = -J_c th_{a,b}  (n = 1)", S::Connection, 1e-5},
      {"torsion_trace_system",
       "J_a t_a = -th_a - J_b C_a = -J_c th_{b,a} - n J_c C_b = J_b th_{c,a} - n J_a C_c", S::Connection, 1e-5},
      {"a_form_lee_formula", "A_a = w_b + J_a w_c = J_a C_b + J_c C_c = J_b (th_c - th_b)", S::Connection, 1e-5},
      {"c_form_lee_formula", "(n-1) J_b C_a = th_a - J_b th_{a,c},  C_a = w_b - J_a w_c", S::Connection, 1e-5},
      {"nijenhuis_two_methods",
       "N_a(X,Y) = A_a(Y) J_b X - A_a(X) J_b Y - J_a A_a(Y) J_c X + J_a A_a(X) J_c Y", S::Connection, 1e-5},

      {"conformal_dc_kaehler", "(d_a F'_a)^+ = J_a df ^ F_a + f (d_a F_a)^+", S::Conformal, 1e-5},
      {"conformal_lee_forms", "th'_a = th_a + (2n-1) d ln f", S::Conformal, 1e-5},
      {"conformal_cross_lee_forms", "th'_{a,c} = th_{a,c} - J_b d ln f", S::Conformal, 1e-5},
      {"conformal_K_forms", "K'_a = K_a - 2 J_b d ln f", S::Conformal, 1e-5},
      {"conformal_sp1_forms", "w'_a = w_a - J_a d ln f", S::Conformal, 1e-5},
      {"conformal_torsion", "T' = f T + sum_a J_a df ^ F_a", S::Conformal, 1e-5},
      {"conformal_connection", "nabla' = nabla + conformal correction in df", S::Conformal, 1e-5},
      {"conformal_torsion_one_form", "t' = t - (2n+1) d ln f", S::Conformal, 1e-5},
      {"conformal_A_invariance", "A'_a = A_a", S::Conformal, 1e-5},
      {"conformal_dt_invariance", "dt' = dt", S::Conformal, 1e-5},
      {"rescaled_metricity", "nabla' g' = 0", S::Conformal, 1e-5},
      {"rescaled_torsion_type", "T'^{0,2}_a = 0", S::Conformal, 1e-5},
      {"rescaled_quaternionic_connection", "nabla' J_a = -w'_b J_c + w'_c J_b", S::Conformal, 1e-5},
      {"rescaled_torsion_one_form_agreement", "J_1 t'_1 = J_2 t'_2 = J_3 t'_3", S::Conformal, 1e-8},
      {"locally_conformal_qkt", "T = 1/(2n+1) sum_a t_a ^ F_a,  dt = 0", S::Conformal, 1e-5},
      {"locally_conformal_hkt", "d(th_a - J_b th_{a,c}) = 0", S::Conformal, 1e-4},

      {"curvature_pair_antisymmetry", "R(X,Y,Z,V) = -R(Y,X,Z,V) = -R(X,Y,V,Z)", S::Curvature, 1e-3},
      {"curvature_commutator", "[R(X,Y), J_a] = (1/n)(rho_c(X,Y) J_b - rho_b(X,Y) J_c)", S::Curvature, 1e-3},
      {"ricci_form_sp1", "rho_a = n (dw_a + w_b ^ w_c)", S::Curvature, 1e-3},
      {"torsion_exterior_derivative", "dT = sigma(nabla T + g(T,T)) - (nabla_U T)(X,Y,Z) + sigma g(T,T)",
       S::Curvature, 1e-3},
      {"first_bianchi", "sigma R(X,Y,Z,U) = sigma((nabla_X T)(Y,Z,U) + g(T(X,Y),T(Z,U)))", S::Curvature, 1e-3},
      {"lc_curvature_relation",
       "R^g = R - 1/2 (nabla_X T)(Y,Z,U) + 1/2 (nabla_Y T)(X,Z,U) - 1/2 g(T(X,Y),T(Z,U)) - 1/4 g(T(Y,Z),T(X,U)) - "
       "1/4 g(T(Z,X),T(Y,U))",
       S::Curvature, 1e-3},
      {"curvature_pair_difference", "R(X,Y,Z,U) - R(Z,U,X,Y) = D(X,Y,Z,U)", S::Curvature, 1e-3},
      {"lc_torsion_derivative", "nabla^g T = nabla T + 1/2 sigma g(T,T)", S::Curvature, 1e-3},
      {"ricci_skew_codifferential", "Ric(X,Y) - Ric(Y,X) = -dT^*(X,Y)", S::Curvature, 1e-3},
      {"mixed_ricci_trace", "n rho_a(X,J_a Y) + rho_b(X,J_b Y) + rho_c(X,J_c Y) in terms of Ric, (dT)_a, (nabla T)_a",
       S::Curvature, 1e-3},
      {"single_ricci_trace", "(n-1) rho_a(X,J_a Y) in terms of Ric, (dT), (nabla T) traces  (n >= 2)",
       S::Curvature, 1e-3},
      {"hkt_ricci_forms_vanish", "HKT => rho_1 = rho_2 = rho_3 = 0", S::Curvature, 1e-3},

      {"hodge_complex_identity", "*psi = -J_a psi ^ F_a", S::Dim4, 1e-10},
      {"torsion_hodge_dual", "T = *t = t_a ^ F_a", S::Dim4, 1e-10},
      {"torsion_one_form_recovered", "J_a t_a = t", S::Dim4, 1e-10},
      {"codifferential_duality", "*dT = -delta t", S::Dim4, 1e-5},
      {"k_tensor_formula", "K = -Ric + nabla^g t - (delta t / 2) g", S::Dim4, 1e-3},
      {"skew_ricci_formula", "Skew(Ric) = -1/4 <dt,F_a> F_a + 1/2 (d^c t)_a", S::Dim4, 1e-3},
      {"lc_ricci_formula", "Ric^g = Sym(Ric) + 1/2 (|t|^2 g - t (x) t)", S::Dim4, 1e-3},
      {"weyl_nonmetricity", "nabla^W g = -t (x) g", S::Dim4, 1e-5},
      {"weyl_ricci_sp1", "Sym(Ric^W) = -Sym(K)", S::Dim4, 1e-3},
      {"weyl_ricci_formula", "Sym(Ric^W) = Ric^g - Sym(nabla^g t) - 1/2 (|t|^2 g - t (x) t) + (delta t / 2) g",
       S::Dim4, 1e-3},
      {"einstein_weyl_equivalence", "|Sym(Ric^W)_0| = |Sym(K)_0|", S::Dim4, 1e-3},
      {"parallel_torsion_expansion",
       "(nabla_Z T)(X,Y,U) = F_a(Y,U)(nabla_Z t)J_a X + F_a(X,Y)(nabla_Z t)J_a U + F_a(U,X)(nabla_Z t)J_a Y",
       S::Dim4, 1e-3},
      {"parallel_torsion_trace", "sum_i (nabla_Z T)(J_a X, e_i, J_a e_i) = 2 (nabla_Z t) X", S::Dim4, 1e-3},
  };
  return catalogue;
}

const IdentityInfo& identity_info(const std::string& id) {
  for (const IdentityInfo& info : identity_catalogue())
    if (info.id == id) return info;
  throw DomainError("unknown identity id '" + id + "'");
}

bool VerificationReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const IdentityRecord& r) { return r.pass; });
}

const IdentityRecord* VerificationReport::find(const std::string& id) const {
  for (const IdentityRecord& r : results)
    if (r.identity_id == id) return &r;
  return nullptr;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json out;
  out["meta"] = meta;
  out["meta"]["all_pass"] = all_pass();
  out["results"] = nlohmann::json::array();
  for (const IdentityRecord& r : results)
    out["results"].push_back({{"identity_id", r.identity_id},
                              {"paper_equation", r.paper_equation},
                              {"points", r.points},
                              {"max_residual", number(r.max_residual)},
                              {"tolerance", r.tolerance},
                              {"pass", r.pass}});
  out["classification"] = classification;
  return out;
}

std::string VerificationReport::body() const {
  nlohmann::json j = to_json();
  j["meta"].erase("timestamp");
  j["meta"].erase("threads");
  return j.dump();
}

std::string VerificationReport::summary() const {
  std::ostringstream os;
  int failed = 0;
  for (const IdentityRecord& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-38s max %.3e  tol %.0e  (%d pts)\n", r.pass ? "ok" : "FAIL",
                  r.identity_id.c_str(), r.max_residual, r.tolerance, r.points);
    os << line;
    if (!r.pass) ++failed;
  }
  if (meta.contains("build_error")) os << "build error: " << meta["build_error"].get<std::string>() << "\n";
  os << (failed == 0 ? "all " + std::to_string(results.size()) + " identities pass"
                     : std::to_string(failed) + " of " + std::to_string(results.size()) + " identities fail")
     << "\n";
  return os.str();
}

namespace {

using Residuals = std::vector<std::pair<std::string, double>>;

struct Context {
  const BuiltManifold* m = nullptr;
  SuiteSelection selection;
  // Conformal suite: base structure, its rescaling and the factor.
  std::optional<QKTStructure> conf_base;
  std::optional<QKTStructure> conf_rescaled;
  std::optional<ConformalFactor> conf_factor;
  bool lc_kinds = false;
  bool is_hkt = false;
};

double max3(const std::array<Tensor, 3>& a, const std::array<Tensor, 3>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < 3; ++i) r = std::max(r, max_abs_diff(a[i], b[i]));
  return r;
}

void connection_residuals(const QKTStructure& s, const Point& p, Residuals& out) {
  const int n = s.n();
  const double h = s.scheme.h;
  const Matrix g = s.data.g(p);
  const auto J = structures_at(s.data, p);
  out.emplace_back("quaternionic_identities", quaternionic_residual(J));
  out.emplace_back("hermitian_metric", hermitian_residual(g, J));
  double skew_F = 0.0;
  for (const Matrix& j : J) skew_F = std::max(skew_F, antisymmetry_residual(kaehler_form(g, j)));
  out.emplace_back("kaehler_form_skew", skew_F);

  const Tensor T = s.torsion_at(p);
  if (n >= 2) {
    out.emplace_back("existence_condition", existence_residual(s.data, p, h));
    double agree = 0.0;
    for (int a = 0; a < 3; ++a) agree = std::max(agree, max_abs_diff(torsion_from_structure(s.data, a, p, h), T));
    out.emplace_back("torsion_structure_agreement", agree);
  }
  out.emplace_back("torsion_skew", torsion_skew_residual(s, p));
  out.emplace_back("metricity", metricity_residual(s, p));
  out.emplace_back("torsion_type", torsion_purity_residual(s, p));

  const Sp1Forms sp = sp1_forms(s, p);
  out.emplace_back("quaternionic_connection", sp.fit_residual);
  out.emplace_back("torsion_one_form_agreement", torsion_one_forms(s, p).agreement);
  if (n >= 2) out.emplace_back("sp1_forms_lee_formula", max3(sp.omega, sp1_forms_from_lee(s.data, p, h)));

  const LeeData lee = lee_data(s.data, p, h);
  const AuxiliaryOneForms aux = auxiliary_one_forms(s, p);
  auto th = [&](int a) -> const Tensor& { return lee.theta[static_cast<std::size_t>(a)]; };
  auto cr = [&](int a, int b) -> const Tensor& {
    return lee.cross[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  };
  auto Jf = [&](int a, const Tensor& psi) { return j_one_form(J[static_cast<std::size_t>(a)], psi); };
  auto C = [&](int a) -> const Tensor& { return aux.C[static_cast<std::size_t>(a)]; };

  double diag = 0.0, anti = 0.0, per1 = 0.0, dim4 = 0.0, trace_sys = 0.0, a_form = 0.0, c_form = 0.0, nij = 0.0;
  const double nn = n;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    diag = std::max(diag, max_abs_diff(cr(a, a), th(a)));
    anti = std::max(anti, max_abs_diff(Jf(b, cr(a, c)), -1.0 * Jf(c, cr(a, b))));
    Tensor rel = (nn * nn + nn) * th(a) - nn * th(b) - nn * nn * th(c) + Jf(c, cr(b, a)) + nn * Jf(a, cr(c, b)) -
                 (nn + 1.0) * Jf(b, cr(a, c));
    per1 = std::max(per1, rel.max_abs());
    if (n == 1) dim4 = std::max(dim4, max_abs_diff(th(a), Jf(b, cr(a, c))));

    const Tensor& jt = aux.t;
    trace_sys = std::max({trace_sys, max_abs_diff(jt, -1.0 * th(a) - Jf(b, C(a))),
                          max_abs_diff(jt, -1.0 * Jf(c, cr(b, a)) - nn * Jf(c, C(b))),
                          max_abs_diff(jt, Jf(b, cr(c, a)) - nn * Jf(a, C(c)))});
    const Tensor& A = aux.A[static_cast<std::size_t>(a)];
    a_form = std::max({a_form, max_abs_diff(A, aux.A_lee[static_cast<std::size_t>(a)]),
                       max_abs_diff(A, Jf(a, C(b)) + Jf(c, C(c)))});
    c_form = std::max(c_form, max_abs_diff((nn - 1.0) * Jf(b, C(a)), th(a) - Jf(b, cr(a, c))));
    nij = std::max(nij, max_abs_diff(nijenhuis_bracket(s.data, a, p, h), nijenhuis_via_connection(s, a, p)));
  }
  out.emplace_back("cross_lee_diagonal", diag);
  out.emplace_back("cross_lee_antisymmetry", anti);
  out.emplace_back("lee_form_relation", per1);
  if (n == 1) out.emplace_back("lee_form_relation_dim4", dim4);
  out.emplace_back("torsion_trace_system", trace_sys);
  out.emplace_back("a_form_lee_formula", a_form);
  out.emplace_back("c_form_lee_formula", c_form);
  out.emplace_back("nijenhuis_two_methods", nij);
}

void conformal_residuals(const Context& ctx, const Point& p, Residuals& out) {
  const QKTStructure& base = *ctx.conf_base;
  const QKTStructure& resc = *ctx.conf_rescaled;
  const ConformalLawResiduals r = conformal_law_residuals(base, resc, *ctx.conf_factor, p);
  out.emplace_back("conformal_dc_kaehler", r.dc_kaehler);
  out.emplace_back("conformal_lee_forms", r.lee);
  out.emplace_back("conformal_cross_lee_forms", r.cross_lee);
  if (base.n() >= 2) out.emplace_back("conformal_K_forms", r.K);
  out.emplace_back("conformal_sp1_forms", r.omega);
  out.emplace_back("conformal_torsion", r.torsion);
  out.emplace_back("conformal_connection", r.connection);
  out.emplace_back("conformal_torsion_one_form", r.t);
  out.emplace_back("conformal_A_invariance", r.A);
  out.emplace_back("conformal_dt_invariance", r.dt_invariance);
  out.emplace_back("rescaled_metricity", metricity_residual(resc, p));
  out.emplace_back("rescaled_torsion_type", torsion_purity_residual(resc, p));
  out.emplace_back("rescaled_quaternionic_connection", sp1_forms(resc, p).fit_residual);
  out.emplace_back("rescaled_torsion_one_form_agreement", torsion_one_forms(resc, p).agreement);
  if (ctx.lc_kinds) {
    out.emplace_back("locally_conformal_qkt", lcqk_residual(ctx.m->structure, p).value());
    out.emplace_back("locally_conformal_hkt", lchkt_residual(ctx.m->structure, p));
  }
}

void curvature_residuals(const Context& ctx, const PointGeometry& pg, Residuals& out, Residuals& extra) {
  const QKTStructure& s = ctx.m->structure;
  const Sp1CurvatureResiduals sp = sp1_curvature_residuals(s, pg);
  const BianchiResiduals b = bianchi_and_symmetry_residuals(s, pg);
  const TraceIdentityResiduals tr = trace_identity_residuals(s, pg);
  out.emplace_back("curvature_pair_antisymmetry", b.curvature_antisymmetry);
  out.emplace_back("curvature_commutator", sp.commutator);
  out.emplace_back("ricci_form_sp1", sp.ricci_form);
  out.emplace_back("torsion_exterior_derivative", b.dT_expansion);
  out.emplace_back("first_bianchi", b.first_bianchi);
  out.emplace_back("lc_curvature_relation", b.lc_curvature);
  out.emplace_back("curvature_pair_difference", b.pair_difference);
  out.emplace_back("lc_torsion_derivative", b.lc_vs_qkt_torsion_derivative);
  out.emplace_back("ricci_skew_codifferential", b.ricci_skew);
  out.emplace_back("mixed_ricci_trace", tr.mixed_trace);
  if (s.n() >= 2) out.emplace_back("single_ricci_trace", tr.single_trace);
  double rho = 0.0;
  for (const Tensor& r : pg.rho) rho = std::max(rho, r.max_abs());
  if (ctx.is_hkt) out.emplace_back("hkt_ricci_forms_vanish", rho);

  extra.emplace_back("ricci_form_max", rho);
  extra.emplace_back("ricci_form_without_factor_n", sp.ricci_form_unscaled);
  extra.emplace_back("lambda", tr.lambda);
  extra.emplace_back("lambda_fit_residual", tr.lambda_fit);
  extra.emplace_back("dT_type22_residual", tr.type22);
  extra.emplace_back("dT_trace_across_structures", tr.dT_traces.across_structures);
  extra.emplace_back("dT_trace_hybrid", tr.dT_traces.hybrid);
  extra.emplace_back("scal", trace_g(pg.ric, pg.g));
}

void dim4_residuals(const Context& ctx, const PointGeometry& pg, Residuals& out, Residuals& extra) {
  const QKTStructure& s = ctx.m->structure;
  const Point& p = pg.p;
  const Matrix& g = pg.g;
  const TorsionOneForms tf = torsion_one_forms(s, p);

  double tri = 0.0;
  std::vector<Tensor> probes;
  for (int i = 0; i < 4; ++i) {
    Tensor e(4, 1);
    e(i) = 1.0;
    probes.push_back(e);
  }
  probes.push_back(tf.t);
  for (const Tensor& psi : probes) {
    const Tensor star = hodge_star_4d(psi, g, s.data.patch.orientation);
    for (int a = 0; a < 3; ++a) {
      const Matrix& Ja = pg.J[static_cast<std::size_t>(a)];
      tri = std::max(tri, max_abs_diff(star, -1.0 * wedge(j_one_form(Ja, psi), kaehler_form(g, Ja))));
    }
  }
  out.emplace_back("hodge_complex_identity", tri);

  const Tensor t = s.input_t ? (*s.input_t)(p) : tf.t;
  double dual = max_abs_diff(pg.T, hodge_star_4d(t, g, s.data.patch.orientation));
  for (int a = 0; a < 3; ++a)
    dual = std::max(dual, max_abs_diff(pg.T, wedge(tf.t_alpha[static_cast<std::size_t>(a)], kaehler_form(g, pg.J[static_cast<std::size_t>(a)]))));
  out.emplace_back("torsion_hodge_dual", dual);
  if (s.input_t) out.emplace_back("torsion_one_form_recovered", max_abs_diff(tf.t, t));

  // First derivatives of T and t only, so both sides use the step h.
  const Tensor dT = exterior_derivative_at(s.torsion, p, s.scheme.h, s.data.patch.domain);
  const Tensor star_dT = hodge_star_4d(dT, g, s.data.patch.orientation);
  const Tensor delta_t = codifferential_at(torsion_one_form_field(s), s.data.patch, p, s.scheme.h);
  out.emplace_back("codifferential_duality", (star_dT + delta_t).max_abs());

  const Dim4Residuals d = dim4_einstein_suite(s, pg);
  out.emplace_back("k_tensor_formula", d.K_formula);
  out.emplace_back("skew_ricci_formula", d.skew_ricci);
  out.emplace_back("lc_ricci_formula", d.lc_ricci);
  const WeylResiduals w = weyl_correspondence(s, pg);
  out.emplace_back("weyl_nonmetricity", w.weyl_metric);
  out.emplace_back("weyl_ricci_sp1", w.sym_ricci_sum);
  out.emplace_back("weyl_ricci_formula", w.sym_ricci_formula);
  out.emplace_back("einstein_weyl_equivalence", std::abs(w.einstein_weyl_deviation - w.sp1_einstein_deviation));
  const ParallelTorsionResiduals pt = parallel_torsion_residuals(s, pg);
  out.emplace_back("parallel_torsion_expansion", pt.expansion);
  out.emplace_back("parallel_torsion_trace", pt.trace);

  extra.emplace_back("einstein_deviation", d.einstein_deviation);
  extra.emplace_back("sp1_einstein_deviation", d.sp1_einstein_deviation);
  extra.emplace_back("einstein_weyl_deviation", w.einstein_weyl_deviation);
  extra.emplace_back("scal_K", d.scal_K);
  extra.emplace_back("skew_ricci_norm", d.skew_ricci_norm);
  extra.emplace_back("dt_norm", d.dt_norm);
  extra.emplace_back("nabla_t_max", pt.nabla_t);
}

struct PointResult {
  Residuals residuals;
  Residuals extra;
};

PointResult evaluate_point(const Context& ctx, const Point& p) {
  PointResult r;
  const QKTStructure& s = ctx.m->structure;
  if (ctx.selection.connection) connection_residuals(s, p, r.residuals);
  if (ctx.selection.conformal) conformal_residuals(ctx, p, r.residuals);
  const bool dim4 = ctx.selection.dim4 && s.n() == 1;
  if (ctx.selection.curvature || dim4) {
    const PointGeometry pg = point_geometry(s, p);
    if (ctx.selection.curvature) curvature_residuals(ctx, pg, r.residuals, r.extra);
    if (dim4) dim4_residuals(ctx, pg, r.residuals, r.extra);
  }
  return r;
}

std::vector<PointResult> evaluate_points(const Context& ctx, const std::vector<Point>& pts, int threads) {
  std::vector<PointResult> results(pts.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < pts.size(); ++i) results[i] = evaluate_point(ctx, pts[i]);
    return results;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < pts.size(); i += static_cast<std::size_t>(workers))
          results[i] = evaluate_point(ctx, pts[i]);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

nlohmann::json spec_json(const ManifoldSpec& spec) {
  nlohmann::json j;
  j["manifold"] = to_string(spec.kind);
  j["n"] = spec.n;
  if (spec.f) j["f"] = *spec.f;
  if (spec.t) j["t"] = std::vector<std::string>(spec.t->begin(), spec.t->end());
  if (spec.probe_f) j["probe_f"] = *spec.probe_f;
  const Box box = spec.effective_domain();
  j["domain"] = {{"lower", std::vector<double>(box.lower.data(), box.lower.data() + box.lower.size())},
                 {"upper", std::vector<double>(box.upper.data(), box.upper.data() + box.upper.size())}};
  j["points"] = spec.points;
  j["h"] = spec.scheme.h;
  j["h2"] = spec.scheme.h2;
  if (spec.perturb_j2_degrees != 0.0) j["perturb_j2_degrees"] = spec.perturb_j2_degrees;
  if (!spec.tolerance_overrides.empty()) j["tolerance_overrides"] = spec.tolerance_overrides;
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

IdentityRecord make_record(const IdentityInfo& info, const ManifoldSpec& spec, int points, double value) {
  IdentityRecord r;
  r.identity_id = info.id;
  r.paper_equation = info.formula;
  r.points = points;
  r.max_residual = value;
  const auto it = spec.tolerance_overrides.find(info.id);
  r.tolerance = it != spec.tolerance_overrides.end() ? it->second : info.tolerance;
  r.pass = std::isfinite(value) && value <= r.tolerance;
  return r;
}

VerificationReport failed_build_report(const ManifoldSpec& spec, const SuiteSelection& selection,
                                       const NotQKTError& e, nlohmann::json meta) {
  VerificationReport report;
  meta["build_error"] = e.what();
  report.meta = std::move(meta);
  if (!selection.connection) return report;
  // The algebraic checks need no connection; report them with the failure.
  const HypercomplexField H = perturbed_hypercomplex(spec.n, spec.perturb_j2_degrees);
  const auto pts = halton_points(spec.effective_domain(), spec.points, spec.seed, sample_margin(spec.scheme));
  double quat = 0.0;
  for (const Point& p : pts) {
    std::array<Matrix, 3> J{H(0, p), H(1, p), H(2, p)};
    quat = std::max(quat, quaternionic_residual(J));
  }
  report.results.push_back(make_record(identity_info("quaternionic_identities"), spec, spec.points, quat));
  report.results.push_back(make_record(identity_info("existence_condition"), spec, spec.points, e.residual()));
  return report;
}

}  // namespace

VerificationReport run_suite(const ManifoldSpec& spec, const SuiteSelection& selection, const RunOptions& options) {
  for (const auto& [id, tol] : spec.tolerance_overrides) {
    identity_info(id);
    if (!(tol >= 0.0)) throw DomainError("tolerance override for '" + id + "' must be nonnegative");
  }
  nlohmann::json meta;
  meta["spec"] = spec_json(spec);
  meta["seed"] = spec.seed;
  meta["timestamp"] = utc_timestamp();
  meta["artifact_version"] = artifact_version();
  meta["threads"] = options.threads;
  std::vector<std::string> suites;
  for (Suite s : {Suite::Connection, Suite::Conformal, Suite::Curvature, Suite::Dim4})
    if (selection.includes(s)) suites.push_back(to_string(s));
  meta["suites"] = suites;

  BuiltManifold m;
  try {
    m = build_manifold(spec);
  } catch (const NotQKTError& e) {
    return failed_build_report(spec, selection, e, std::move(meta));
  }

  Context ctx;
  ctx.m = &m;
  ctx.selection = selection;
  ctx.lc_kinds = spec.kind != ManifoldKind::Dim4Torsion;
  if (selection.conformal) {
    if (m.conformal_base) {
      ctx.conf_base = m.conformal_base;
      ctx.conf_rescaled = m.structure;
      ctx.conf_factor = m.factor;
      meta["conformal_factor"] = m.factor_text;
    } else {
      const Expression fe = parse_field_expression(spec.probe_f.value_or("exp(x1)"), spec.dim());
      ctx.conf_factor = ConformalFactor{[fe](const Point& p) { return fe(p); }};
      ctx.conf_base = m.structure;
      ctx.conf_rescaled = conformal_rescale(m.structure, *ctx.conf_factor, m.points);
      meta["conformal_factor"] = fe.to_string();
    }
  }

  VerificationReport report;
  const Classification cls = classify(m.structure, m.points);
  ctx.is_hkt = cls.is_hkt;
  nlohmann::json& c = report.classification;
  c["hkt"] = cls.is_hkt;
  c["hkt_residual"] = number(cls.hkt_residual);
  c["integrable"] = cls.is_integrable;
  c["integrable_residual"] = number(cls.integrable_residual);
  c["parallel_torsion"] = cls.is_parallel_torsion;
  c["parallel_torsion_residual"] = number(cls.parallel_torsion_residual);
  c["strong"] = cls.is_strong;
  c["strong_residual"] = number(cls.strong_residual);
  c["dT_type22"] = number(cls.dT_type22);
  if (m.structure.n() >= 2) {
    double swapped = 0.0;
    for (const Point& p : m.points) {
      const LeeData lee = lee_data(m.structure.data, p, m.structure.scheme.h);
      const auto J = structures_at(m.structure.data, p);
      for (int a = 0; a < 3; ++a) swapped = std::max(swapped, hkt_defect_swapped(lee, J, a).max_abs());
    }
    c["hkt_residual_swapped_cross_indices"] = number(swapped);
  }

  const std::vector<PointResult> per_point = evaluate_points(ctx, m.points, options.threads);

  std::map<std::string, std::pair<double, int>> agg;
  std::map<std::string, std::pair<double, double>> extra;
  for (const PointResult& pr : per_point) {
    for (const auto& [id, v] : pr.residuals) {
      auto [it, fresh] = agg.try_emplace(id, v, 0);
      auto& [mx, count] = it->second;
      if (!fresh && !std::isnan(mx)) mx = std::isnan(v) ? v : std::max(mx, v);
      ++count;
    }
    for (const auto& [id, v] : pr.extra) {
      auto [it, fresh] = extra.try_emplace(id, v, v);
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  for (const IdentityInfo& info : identity_catalogue()) {
    const auto it = agg.find(info.id);
    if (it == agg.end()) continue;
    report.results.push_back(make_record(info, spec, it->second.second, it->second.first));
  }
  for (const auto& [id, range] : extra) c[id] = {{"min", number(range.first)}, {"max", number(range.second)}};
  report.meta = std::move(meta);
  return report;
}

}  // namespace qkt
