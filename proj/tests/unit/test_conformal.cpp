#include "qkt/conformal.hpp"

#include "../support/oracles.hpp"
#include "../support/structures.hpp"

#include <gtest/gtest.h>

using namespace qkt;
using namespace fixture;

TEST(Conformal, NonPositiveFactorIsRejected) {
  const QKTStructure s = flat4();
  const ConformalFactor zero_at_centre{[](const Point& p) { return p(0); }};
  EXPECT_THROW(conformal_rescale(s, zero_at_centre), DomainError);

  const ConformalFactor sign_change{[](const Point& p) { return p(0) + 0.3; }};
  Point q = Point::Zero(4);
  q(0) = -0.4;
  EXPECT_THROW(conformal_rescale(s, sign_change, {q}), DomainError);
  const QKTStructure lazy = conformal_rescale(s, sign_change);
  EXPECT_THROW(lazy.data.g(q), DomainError);
}

TEST(Conformal, RescaledFlatTorsionMatchesClosedForm) {
  const QKTStructure s = conformal_rescale(flat4(), ConformalFactor{exp_x1});
  const Point p = oracle::sample_point(4, 3);
  Tensor expected(4, 3);
  for (int a = 0; a < 3; ++a)
    expected += wedge(j_one_form(s.data.J(a, p), Tensor::from_vector(exp_x1(p) * dln_exp_x1(p))),
                      kaehler_form(Matrix::Identity(4, 4), s.data.J(a, p)));
  EXPECT_LE(max_abs_diff(s.torsion_at(p), expected), 1e-8);
  // t̄ = -3 d ln f in dimension 4.
  EXPECT_LE(max_abs_diff(torsion_one_forms(s, p).t, -3.0 * Tensor::from_vector(dln_exp_x1(p))), 1e-8);
}

TEST(Conformal, LawsHoldOverATwistedBase) {
  for (auto t : {t_const, t_sin}) {
    const QKTStructure base = dim4(fixture::one, t);
    const ConformalFactor f{quad};
    const QKTStructure bar = conformal_rescale(base, f);
    for (unsigned seed = 0; seed < 3; ++seed) {
      const ConformalLawResiduals r = conformal_law_residuals(base, bar, f, oracle::sample_point(4, seed));
      EXPECT_LE(r.dc_kaehler, 1e-5);
      EXPECT_LE(r.lee, 1e-5);
      EXPECT_LE(r.cross_lee, 1e-5);
      EXPECT_LE(r.omega, 1e-5);
      EXPECT_LE(r.connection, 1e-5);
      EXPECT_LE(r.t, 1e-5);
      EXPECT_LE(r.A, 1e-5);
      EXPECT_LE(r.dt_invariance, 1e-5);
    }
  }
}

TEST(Conformal, LawsInHigherDimension) {
  const QKTStructure base = build_qkt(conformal_data(2, exp_x1), FDScheme{});
  const ConformalFactor f{quad};
  const QKTStructure bar = conformal_rescale(base, f);
  const ConformalLawResiduals r = conformal_law_residuals(base, bar, f, oracle::sample_point(8, 1));
  EXPECT_LE(r.K, 1e-5);
  EXPECT_LE(r.torsion, 1e-5);
  EXPECT_LE(r.lee, 1e-5);
}

TEST(Conformal, DirectConnectionFormulaAgrees) {
  const QKTStructure base = dim4(fixture::one, t_sin);
  const ConformalFactor f{exp_x1};
  const QKTStructure bar = conformal_rescale(base, f);
  const Point p = oracle::sample_point(4, 6);
  EXPECT_LE(max_abs_diff(rescaled_connection_direct(base, f, p), bar.connection_at(p)), 1e-7);
}

TEST(Conformal, LocallyConformalCharacterisations) {
  const QKTStructure lc = conformal_rescale(flat4(), ConformalFactor{quad});
  const Point p = oracle::sample_point(4, 2);
  EXPECT_LE(lcqk_residual(lc, p).value(), 1e-5);
  EXPECT_LE(lchkt_residual(lc, p), 1e-4);
  // t = sin(x2) dx1 is not closed, so the rescaled structure is not locally conformally QKT-flat.
  const QKTStructure twisted = conformal_rescale(dim4(fixture::one, t_sin), ConformalFactor{quad});
  EXPECT_GT(lcqk_residual(twisted, p).dt, 0.1);
}
