#include "qkt/suite.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace qkt;

namespace {

ManifoldSpec small(ManifoldKind kind, int n, int points = 3) {
  ManifoldSpec s;
  s.kind = kind;
  s.n = n;
  s.points = points;
  return s;
}

}  // namespace

TEST(Zoo, HaltonPointsAreDeterministicAndInterior) {
  const Box box = Box::cube(4, -0.5, 0.5);
  const auto a = halton_points(box, 20, 42, 0.003);
  const auto b = halton_points(box, 20, 42, 0.003);
  const auto c = halton_points(box, 20, 43, 0.003);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i] == b[i]);
    EXPECT_TRUE(box.contains(a[i], 0.003));
  }
  EXPECT_FALSE(a[0] == c[0]);
  // First Halton point with index 43 in base 2: 43 = 101011b, radical inverse 0.110101b.
  const double u = 0.5 + 0.25 + 0.0625 + 0.015625;
  EXPECT_NEAR(a[0](0), -0.5 + 0.003 + u * (1.0 - 0.006), 1e-15);
  EXPECT_DOUBLE_EQ(sample_margin(FDScheme{}), 3e-3);
}

TEST(Zoo, SpecValidation) {
  ManifoldSpec s = small(ManifoldKind::ConformalFlat, 2);
  EXPECT_THROW(s.validate(), DomainError);  // f missing
  s.f = "exp(x9)";
  EXPECT_THROW(build_manifold(s), ParseError);
  s.f = "exp(";
  EXPECT_THROW(build_manifold(s), ParseError);

  ManifoldSpec t = small(ManifoldKind::Dim4Torsion, 2);
  t.t = std::array<std::string, 4>{"1", "0", "0", "0"};
  EXPECT_THROW(t.validate(), DimensionError);

  ManifoldSpec h = small(ManifoldKind::HopfLocal, 1);
  h.domain = Box::cube(4, -1.0, 1.0);
  EXPECT_THROW(h.validate(), DomainError);

  ManifoldSpec neg = small(ManifoldKind::ConformalFlat, 2);
  neg.f = "x1";
  EXPECT_THROW(build_manifold(neg), DomainError);
  EXPECT_THROW(parse_manifold_kind("sphere"), DomainError);
  EXPECT_EQ(parse_manifold_kind("hopf_local"), ManifoldKind::HopfLocal);
}

TEST(Zoo, BuiltTorsionOfDimensionFourExample) {
  ManifoldSpec s = small(ManifoldKind::Dim4Torsion, 1);
  s.t = std::array<std::string, 4>{"0.3", "0", "0", "0"};
  const BuiltManifold m = build_manifold(s);
  const Tensor T = m.structure.torsion_at(m.points[0]);
  EXPECT_NEAR(T(1, 2, 3), 0.3, 1e-14);
  EXPECT_NEAR(T(0, 2, 3), 0.0, 1e-14);
}

TEST(Catalogue, IdsAreUnique) {
  std::set<std::string> ids;
  for (const IdentityInfo& info : identity_catalogue()) {
    EXPECT_TRUE(ids.insert(info.id).second) << info.id;
    EXPECT_FALSE(info.formula.empty());
    EXPECT_GT(info.tolerance, 0.0);
  }
  EXPECT_THROW(identity_info("no_such_identity"), DomainError);
}

TEST(Suite, SelectionParsing) {
  const SuiteSelection s = SuiteSelection::parse("connection,dim4");
  EXPECT_TRUE(s.includes(Suite::Connection));
  EXPECT_FALSE(s.includes(Suite::Curvature));
  EXPECT_TRUE(SuiteSelection::parse("all").includes(Suite::Conformal));
  EXPECT_THROW(SuiteSelection::parse("geometry"), DomainError);
}

TEST(Suite, FlatQuaternionicPlaneAllPass) {
  const VerificationReport r = run_suite(small(ManifoldKind::Flat, 2), SuiteSelection::parse("connection,conformal"));
  EXPECT_TRUE(r.all_pass());
  std::set<std::string> seen;
  for (const IdentityRecord& rec : r.results) {
    EXPECT_TRUE(seen.insert(rec.identity_id).second);
    const IdentityInfo& info = identity_info(rec.identity_id);
    EXPECT_EQ(rec.paper_equation, info.formula);
    EXPECT_EQ(rec.pass, rec.max_residual <= rec.tolerance);
    EXPECT_EQ(rec.points, 3);
  }
  for (const char* id : {"metricity", "torsion_skew", "quaternionic_connection", "existence_condition"})
    EXPECT_LE(r.find(id)->max_residual, 1e-8) << id;
}

TEST(Suite, ToleranceOverride) {
  ManifoldSpec s = small(ManifoldKind::Dim4Torsion, 1, 2);
  s.t = std::array<std::string, 4>{"sin(x2)", "0", "0", "0"};
  s.tolerance_overrides["metricity"] = 1e-30;
  const VerificationReport r = run_suite(s, SuiteSelection::only(Suite::Connection));
  const IdentityRecord* m = r.find("metricity");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->tolerance, 1e-30);
  EXPECT_EQ(m->pass, m->max_residual <= 1e-30);
  s.tolerance_overrides = {{"not_an_identity", 1.0}};
  EXPECT_THROW(run_suite(s, SuiteSelection::only(Suite::Connection)), DomainError);
}

TEST(Suite, DeterministicAcrossRunsAndThreads) {
  ManifoldSpec s = small(ManifoldKind::ConformalFlat, 1, 4);
  s.f = "1+x1^2+x3^2";
  const SuiteSelection sel = SuiteSelection::parse("connection,curvature");
  const std::string a = run_suite(s, sel).body();
  const std::string b = run_suite(s, sel).body();
  EXPECT_EQ(a, b);
  const VerificationReport c = run_suite(s, sel, RunOptions{3});
  const VerificationReport d = run_suite(s, sel);
  ASSERT_EQ(c.results.size(), d.results.size());
  for (std::size_t i = 0; i < c.results.size(); ++i) EXPECT_EQ(c.results[i].max_residual, d.results[i].max_residual);
}

TEST(Suite, BrokenStructureGivesFailingReport) {
  ManifoldSpec s = small(ManifoldKind::ConformalFlat, 2);
  s.f = "exp(x1)";
  s.perturb_j2_degrees = 15.0;
  const VerificationReport r = run_suite(s, SuiteSelection::parse("all"));
  EXPECT_FALSE(r.all_pass());
  const IdentityRecord* e = r.find("existence_condition");
  ASSERT_NE(e, nullptr);
  EXPECT_FALSE(e->pass);
  EXPECT_GT(e->max_residual, 1e-2);
}

TEST(Report, JsonSchema) {
  const VerificationReport r = run_suite(small(ManifoldKind::Flat, 1, 2), SuiteSelection::only(Suite::Dim4));
  const nlohmann::json j = nlohmann::json::parse(r.to_json().dump());
  ASSERT_TRUE(j.contains("meta"));
  ASSERT_TRUE(j.contains("results"));
  for (const char* key : {"seed", "timestamp", "artifact_version"}) EXPECT_TRUE(j["meta"].contains(key)) << key;
  for (const auto& rec : j["results"])
    for (const char* key : {"identity_id", "paper_equation", "points", "max_residual", "tolerance", "pass"})
      EXPECT_TRUE(rec.contains(key)) << key;
  EXPECT_EQ(j["results"].size(), r.results.size());
  const double v = j["results"][0]["max_residual"].get<double>();
  EXPECT_EQ(v, r.results[0].max_residual);
}
