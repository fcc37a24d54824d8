#include "qkt/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

namespace {

constexpr std::array<int, 4> kCycYZX{1, 2, 0, 3};  // out(x,y,z,u) = A(y,z,x,u)
constexpr std::array<int, 4> kCycZXY{2, 0, 1, 3};  // out(x,y,z,u) = A(z,x,y,u)

// out(i_0..i_3) = a(i_{perm[0]}, .., i_{perm[3]}).
Tensor perm4(const Tensor& a, std::array<int, 4> perm) {
  std::array<int, 4> inv{};
  for (int k = 0; k < 4; ++k) inv[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = k;
  return a.permuted(inv);
}

Tensor cyclic_sum3(const Tensor& a) {
  Tensor out = a;
  out += perm4(a, kCycYZX);
  out += perm4(a, kCycZXY);
  return out;
}

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Matrix outer(const Vector& a, const Vector& b) { return a * b.transpose(); }

}  // namespace

double CurvatureValue::antisymmetry_xy() const { return (low + low.permuted(std::array<int, 4>{1, 0, 2, 3})).max_abs(); }
double CurvatureValue::antisymmetry_zv() const { return (low + low.permuted(std::array<int, 4>{0, 1, 3, 2})).max_abs(); }

CurvatureValue curvature_tensor(const ConnectionField& conn, const Matrix& g, const Point& p, double h2,
                                const Box& domain, CurvatureSource source) {
  const Tensor G = conn(p);
  const Tensor dG = gradient(conn, p, h2, domain);  // dG(i, l, j, k) = ∂_i Γ^l_jk
  const int n = G.dim();
  CurvatureValue out;
  out.source = source;
  out.up = Tensor(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant, Variance::Covariant});
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double v = dG(i, l, j, k) - dG(j, l, i, k);
          for (int m = 0; m < n; ++m) v += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          out.up(l, k, i, j) = v;
        }
  out.low = Tensor(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int v = 0; v < n; ++v) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += g(v, l) * out.up(l, k, i, j);
          out.low(i, j, k, v) = s;
        }
  return out;
}

CurvatureValue qkt_curvature(const QKTStructure& s, const Point& p) {
  return curvature_tensor(s.connection(), s.data.g(p), p, s.scheme.h2, s.data.patch.domain, CurvatureSource::QKT);
}

CurvatureValue levi_civita_curvature(const QKTStructure& s, const Point& p) {
  return curvature_tensor(levi_civita_field(s.data.patch, s.scheme.h), s.data.g(p), p, s.scheme.h2,
                          s.data.patch.domain, CurvatureSource::LeviCivita);
}

std::array<Tensor, 3> ricci_forms(const CurvatureValue& R, const Matrix& g, const std::array<Matrix, 3>& J) {
  std::array<Tensor, 3> out;
  for (int a = 0; a < 3; ++a) {
    out[static_cast<std::size_t>(a)] = contract_last_two(R.low, trace_matrix(g, J[static_cast<std::size_t>(a)]));
    out[static_cast<std::size_t>(a)] *= 0.5;
  }
  return out;
}

Matrix ricci_tensor(const CurvatureValue& R, const Matrix& g) {
  const Matrix ginv = inverse_metric(g);
  const int n = static_cast<int>(g.rows());
  Matrix ric = Matrix::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) ric(x, y) += ginv(a, b) * R.low(a, x, y, b);
  return ric;
}

double trace_g(const Matrix& b, const Matrix& g) { return (inverse_metric(g) * b).trace(); }
Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }
Matrix skew(const Matrix& m) { return 0.5 * (m - m.transpose()); }

PointGeometry point_geometry(const QKTStructure& s, const Point& p) {
  PointGeometry pg;
  const int n = s.dim();
  pg.p = p;
  pg.g = s.data.g(p);
  pg.ginv = inverse_metric(pg.g);
  pg.J = structures_at(s.data, p);
  for (int a = 0; a < 3; ++a) pg.M[static_cast<std::size_t>(a)] = trace_matrix(pg.g, pg.J[static_cast<std::size_t>(a)]);
  pg.T = s.torsion_at(p);
  pg.gTT = Tensor(n, 4);
  const Tensor Tup = eval_with_j(pg.T, pg.ginv, {2});
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int u = 0; u < n; ++u) {
          double v = 0.0;
          for (int m = 0; m < n; ++m) v += Tup(x, y, m) * pg.T(z, u, m);
          pg.gTT(x, y, z, u) = v;
        }
  const Tensor gradT = gradient(s.torsion.eval, p, s.scheme.h2, s.data.patch.domain);
  pg.nablaT = covariant_derivative_from(s.connection_at(p), pg.T, gradT);
  pg.nablaGT = covariant_derivative_from(levi_civita(s.data.patch, p, s.scheme.h), pg.T, gradT);
  pg.dT = exterior_derivative_of_gradient(gradT);
  pg.R = qkt_curvature(s, p);
  pg.Rg = levi_civita_curvature(s, p);
  pg.rho = ricci_forms(pg.R, pg.g, pg.J);
  pg.ric = ricci_tensor(pg.R, pg.g);
  pg.ric_g = ricci_tensor(pg.Rg, pg.g);
  return pg;
}

Sp1CurvatureResiduals sp1_curvature_residuals(const QKTStructure& s, const PointGeometry& pg) {
  const int N = s.dim();
  const double n = s.n();
  Sp1CurvatureResiduals r;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    const Matrix& ja = pg.J[static_cast<std::size_t>(a)];
    const Matrix& jb = pg.J[static_cast<std::size_t>(b)];
    const Matrix& jc = pg.J[static_cast<std::size_t>(c)];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        Matrix Rm(N, N);
        for (int l = 0; l < N; ++l)
          for (int k = 0; k < N; ++k) Rm(l, k) = pg.R.up(l, k, i, j);
        const Matrix comm = Rm * ja - ja * Rm;
        const Matrix pred = (pg.rho[static_cast<std::size_t>(c)](i, j) * jb - pg.rho[static_cast<std::size_t>(b)](i, j) * jc) / n;
        r.commutator = std::max(r.commutator, max_abs(comm - pred));
      }
  }

  const Point& p = pg.p;
  const double h2 = s.scheme.h2;
  if (!s.data.patch.domain.contains(p, h2)) throw BoundaryError("sp(1) curvature stencil leaves the domain");
  std::array<Tensor, 3> grad;
  for (auto& t : grad) t = Tensor(N, 2);
  for (int i = 0; i < N; ++i) {
    Point qp = p;
    Point qm = p;
    qp(i) += h2;
    qm(i) -= h2;
    const Sp1Forms wp = sp1_forms(s, qp);
    const Sp1Forms wm = sp1_forms(s, qm);
    for (int a = 0; a < 3; ++a)
      for (int x = 0; x < N; ++x)
        grad[static_cast<std::size_t>(a)](i, x) =
            (wp.omega[static_cast<std::size_t>(a)](x) - wm.omega[static_cast<std::size_t>(a)](x)) / (2.0 * h2);
  }
  const Sp1Forms w = sp1_forms(s, p);
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    Tensor curv = exterior_derivative_of_gradient(grad[static_cast<std::size_t>(a)]);
    curv += wedge(w.omega[static_cast<std::size_t>(b)], w.omega[static_cast<std::size_t>(c)]);
    const Tensor& rho = pg.rho[static_cast<std::size_t>(a)];
    r.ricci_form = std::max(r.ricci_form, max_abs_diff(rho, n * curv));
    r.ricci_form_unscaled = std::max(r.ricci_form_unscaled, max_abs_diff(rho, curv));
  }
  return r;
}

BianchiResiduals bianchi_and_symmetry_residuals(const QKTStructure& s, const PointGeometry& pg) {
  (void)s;
  BianchiResiduals r;
  const Tensor& nT = pg.nablaT;
  const Tensor& gTT = pg.gTT;
  const Tensor& R = pg.R.low;

  Tensor sof = nT + 0.5 * cyclic_sum3(gTT);
  r.lc_vs_qkt_torsion_derivative = max_abs_diff(pg.nablaGT, sof);

  Tensor dT_pred = cyclic_sum3(nT + gTT);
  dT_pred -= perm4(nT, {3, 0, 1, 2});
  dT_pred += cyclic_sum3(gTT);
  r.dT_expansion = max_abs_diff(pg.dT, dT_pred);

  r.first_bianchi = max_abs_diff(cyclic_sum3(R), cyclic_sum3(nT + gTT));

  Tensor lc_pred = R;
  lc_pred -= 0.5 * nT;
  lc_pred += 0.5 * perm4(nT, {1, 0, 2, 3});
  lc_pred -= 0.5 * gTT;
  lc_pred -= 0.25 * perm4(gTT, kCycYZX);
  lc_pred -= 0.25 * perm4(gTT, kCycZXY);
  r.lc_curvature = max_abs_diff(pg.Rg.low, lc_pred);

  const Tensor D = R - perm4(R, {2, 3, 0, 1});
  Tensor predD = 0.5 * nT;
  predD -= 0.5 * perm4(nT, {1, 0, 2, 3});
  predD -= 0.5 * perm4(nT, {2, 3, 0, 1});
  predD += 0.5 * perm4(nT, {3, 2, 0, 1});
  r.pair_difference = max_abs_diff(D, predD);

  Tensor deltaT = contract_first_two(pg.nablaGT, pg.ginv);
  deltaT *= -1.0;
  r.ricci_skew = max_abs(pg.ric - pg.ric.transpose() + deltaT.to_matrix());
  r.curvature_antisymmetry = std::max(pg.R.antisymmetry_xy(), pg.R.antisymmetry_zv());
  return r;
}

TraceIdentityResiduals trace_identity_residuals(const QKTStructure& s, const PointGeometry& pg) {
  const double n = s.n();
  TraceIdentityResiduals r;
  std::array<Matrix, 3> rJ;
  std::array<Matrix, 3> dTJ;
  std::array<Matrix, 3> nTJ;
  for (int a = 0; a < 3; ++a) {
    const auto ia = static_cast<std::size_t>(a);
    rJ[ia] = pg.rho[ia].to_matrix() * pg.J[ia];
    dTJ[ia] = contract_last_two(pg.dT, pg.M[ia]).to_matrix() * pg.J[ia];
    nTJ[ia] = contract_last_two(pg.nablaT, pg.M[ia]).to_matrix() * pg.J[ia];
  }
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    const auto ic = static_cast<std::size_t>(c);
    const Matrix lhs20 = n * rJ[ia] + rJ[ib] + rJ[ic];
    const Matrix rhs20 = -n * pg.ric + n / 4.0 * dTJ[ia] + n / 2.0 * nTJ[ia];
    r.mixed_trace = std::max(r.mixed_trace, max_abs(lhs20 - rhs20));
    if (s.n() >= 2) {
      const Matrix lhs22 = (n - 1.0) * rJ[ia];
      const Matrix rhs22 = -n * (n - 1.0) / (n + 2.0) * pg.ric +
                           n / (4.0 * (n + 2.0)) * ((n + 1.0) * dTJ[ia] - dTJ[ib] - dTJ[ic]) +
                           n / (2.0 * (n + 2.0)) * ((n + 1.0) * nTJ[ia] - nTJ[ib] - nTJ[ic]);
      r.single_trace = std::max(r.single_trace, max_abs(lhs22 - rhs22));
    }
  }
  double num = 0.0;
  for (const Matrix& m : rJ) num += (m.array() * pg.g.array()).sum();
  r.lambda = num / (3.0 * pg.g.squaredNorm());
  for (const Matrix& m : rJ) r.lambda_fit = std::max(r.lambda_fit, max_abs(m - r.lambda * pg.g));
  r.type22 = dT_type22_residual(pg.dT, pg.J);
  r.dT_traces = dT_trace_equalities(pg.dT, pg.g, pg.J);
  return r;
}

namespace {

struct Dim4Pieces {
  Vector t;
  Matrix nabla_g_t;  // (∇^g_x t)(y)
  double delta_t = 0.0;
  Matrix dt;
};

Dim4Pieces dim4_pieces(const QKTStructure& s, const PointGeometry& pg) {
  if (s.n() != 1) throw DimensionError("dimension-4 identities need n = 1");
  const FormField tf = torsion_one_form_field(s);
  const double h2 = s.scheme.h2;
  const Box& box = s.data.patch.domain;
  Dim4Pieces d;
  const Tensor tval = tf(pg.p);
  d.t = tval.to_vector();
  const Tensor gradt = gradient(tf.eval, pg.p, h2, box);
  d.nabla_g_t = covariant_derivative_from(levi_civita(s.data.patch, pg.p, s.scheme.h), tval, gradt).to_matrix();
  d.dt = exterior_derivative_of_gradient(gradt).to_matrix();
  d.delta_t = -(pg.ginv.array() * d.nabla_g_t.array()).sum();
  return d;
}

}  // namespace

Dim4Residuals dim4_einstein_suite(const QKTStructure& s, const PointGeometry& pg) {
  const Dim4Pieces d = dim4_pieces(s, pg);
  const Matrix& g = pg.g;
  Dim4Residuals r;
  r.K = Matrix::Zero(4, 4);
  for (int a = 0; a < 3; ++a) r.K += pg.rho[static_cast<std::size_t>(a)].to_matrix() * pg.J[static_cast<std::size_t>(a)];
  r.K_formula = max_abs(r.K - (-pg.ric + d.nabla_g_t - 0.5 * d.delta_t * g));

  const Matrix sk = skew(pg.ric);
  for (int a = 0; a < 3; ++a) {
    const Matrix& J = pg.J[static_cast<std::size_t>(a)];
    const Matrix F = g * J;
    const double ip = (pg.ginv * d.dt * pg.ginv.transpose()).cwiseProduct(F).sum();
    r.skew_ricci = std::max(r.skew_ricci, max_abs(sk - (-0.25 * ip * F + 0.5 * J.transpose() * d.dt * J)));
  }
  const double t2 = d.t.dot(pg.ginv * d.t);
  r.lc_ricci = max_abs(pg.ric_g - (sym(pg.ric) + 0.5 * (t2 * g - outer(d.t, d.t))));
  r.scal = trace_g(pg.ric, g);
  r.scal_K = trace_g(r.K, g);
  r.einstein_deviation = max_abs(sym(pg.ric) - r.scal / 4.0 * g);
  r.sp1_einstein_deviation = max_abs(sym(r.K) - r.scal_K / 4.0 * g);
  r.skew_ricci_norm = max_abs(sk);
  r.dt_norm = max_abs(d.dt);
  return r;
}

ConnectionField weyl_connection(const QKTStructure& s) {
  if (s.n() != 1) throw DimensionError("the Weyl correspondence is a dimension-4 statement");
  const FormField tf = torsion_one_form_field(s);
  return [s, tf](const Point& q) {
    Tensor G = levi_civita(s.data.patch, q, s.scheme.h);
    const Matrix g = s.data.patch.metric(q);
    const Vector t = tf(q).to_vector();
    const Vector tsharp = inverse_metric(g) * t;
    const int n = G.dim();
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          G(l, i, j) += 0.5 * (l == j ? t(i) : 0.0) + 0.5 * (l == i ? t(j) : 0.0) - 0.5 * g(i, j) * tsharp(l);
    return G;
  };
}

WeylResiduals weyl_correspondence(const QKTStructure& s, const PointGeometry& pg) {
  const Dim4Pieces d = dim4_pieces(s, pg);
  const Matrix& g = pg.g;
  const ConnectionField gw = weyl_connection(s);
  const Box& box = s.data.patch.domain;
  WeylResiduals r;

  Tensor ng = covariant_derivative(gw(pg.p), as_tensor_field(s.data.patch.metric), pg.p, s.scheme.h, box);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) ng(i, j, k) += d.t(i) * g(j, k);
  r.weyl_metric = ng.max_abs();

  const CurvatureValue RW = curvature_tensor(gw, g, pg.p, s.scheme.h2, box, CurvatureSource::Weyl);
  const Matrix sym_w = sym(ricci_tensor(RW, g));
  Matrix K = Matrix::Zero(4, 4);
  for (int a = 0; a < 3; ++a) K += pg.rho[static_cast<std::size_t>(a)].to_matrix() * pg.J[static_cast<std::size_t>(a)];
  r.sym_ricci_sum = max_abs(sym_w + sym(K));
  const double t2 = d.t.dot(pg.ginv * d.t);
  r.sym_ricci_formula =
      max_abs(sym_w - (pg.ric_g - sym(d.nabla_g_t) - 0.5 * (t2 * g - outer(d.t, d.t)) + 0.5 * d.delta_t * g));
  r.einstein_weyl_deviation = max_abs(sym_w - trace_g(sym_w, g) / 4.0 * g);
  r.sp1_einstein_deviation = max_abs(sym(K) - trace_g(K, g) / 4.0 * g);
  return r;
}

ParallelTorsionResiduals parallel_torsion_residuals(const QKTStructure& s, const PointGeometry& pg) {
  if (s.n() != 1) throw DimensionError("parallel-torsion expansion is a dimension-4 statement");
  const FormField tf = torsion_one_form_field(s);
  const Box& box = s.data.patch.domain;
  const Tensor tval = tf(pg.p);
  const Tensor gradt = gradient(tf.eval, pg.p, s.scheme.h2, box);
  const Matrix nt = covariant_derivative_from(s.connection_at(pg.p), tval, gradt).to_matrix();
  const Matrix ngt = covariant_derivative_from(levi_civita(s.data.patch, pg.p, s.scheme.h), tval, gradt).to_matrix();
  ParallelTorsionResiduals r;
  r.nabla_t = max_abs(nt);
  r.nabla_g_t = max_abs(ngt);
  for (int a = 0; a < 3; ++a) {
    const Matrix& J = pg.J[static_cast<std::size_t>(a)];
    const Matrix F = pg.g * J;
    const Matrix ntJ = nt * J;  // (∇_z t)(J x)
    Tensor pred(4, 4);
    for (int z = 0; z < 4; ++z)
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
          for (int u = 0; u < 4; ++u)
            pred(z, x, y, u) = F(y, u) * ntJ(z, x) + F(x, y) * ntJ(z, u) + F(u, x) * ntJ(z, y);
    r.expansion = std::max(r.expansion, max_abs_diff(pg.nablaT, pred));
    const Matrix lhs = contract_last_two(eval_with_j(pg.nablaT, J, {1}), pg.M[static_cast<std::size_t>(a)]).to_matrix();
    r.trace = std::max(r.trace, max_abs(lhs - 2.0 * nt));
  }
  return r;
}

}  // namespace qkt
