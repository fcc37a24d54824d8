#include "qkt/conformal.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

namespace {

double checked_factor(const ConformalFactor& f, const Point& p) {
  const double v = f(p);
  if (!(v >= 1e-8)) throw DomainError("conformal factor is not positive (" + std::to_string(v) + ")");
  return v;
}

Tensor as_one_form(const Vector& v) { return Tensor::from_vector(v); }

}  // namespace

Vector ConformalFactor::log_gradient(const Point& p, double h, const Box& domain) const {
  return gradient(p, h, domain) / checked_factor(*this, p);
}

QKTStructure conformal_rescale(const QKTStructure& s, const ConformalFactor& f,
                               const std::vector<Point>& checkpoints) {
  const Box& box = s.data.patch.domain;
  checked_factor(f, 0.5 * (box.lower + box.upper));
  for (const Point& p : checkpoints) checked_factor(f, p);

  QKTStructure out = s;
  const MatrixField base_metric = s.data.patch.metric;
  out.data.patch.metric = [base_metric, f](const Point& p) -> Matrix { return checked_factor(f, p) * base_metric(p); };
  const double h = s.scheme.h;
  out.torsion = FormField{3, [s, f, h](const Point& p) {
                            const Vector df = f.gradient(p, h, s.data.patch.domain);
                            const Matrix g = s.data.patch.metric(p);
                            Tensor t = checked_factor(f, p) * s.torsion(p);
                            for (int a = 0; a < 3; ++a) {
                              const Matrix J = s.data.J(a, p);
                              t += wedge(j_one_form(J, as_one_form(df)), kaehler_form(g, J));
                            }
                            return t;
                          }};
  if (s.input_t) out.input_t = torsion_one_form_field(out);
  return out;
}

Tensor rescaled_connection_direct(const QKTStructure& s, const ConformalFactor& f, const Point& p) {
  const int n = s.dim();
  const double fv = checked_factor(f, p);
  const Vector df = f.gradient(p, s.scheme.h, s.data.patch.domain);
  const Matrix g = s.data.g(p);
  const Tensor gamma = s.connection_at(p);
  Tensor extra(n, 3);
  for (int a = 0; a < 3; ++a) {
    const Matrix J = s.data.J(a, p);
    extra += wedge(j_one_form(J, as_one_form(df)), kaehler_form(g, J));
  }
  // low(i,j,m) = ḡ(∇̄_i ∂_j, ∂_m)
  Tensor low(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) v += g(m, l) * gamma(l, i, j);
        v *= fv;
        v += 0.5 * (df(i) * g(j, m) + df(j) * g(i, m) - df(m) * g(i, j));
        v += 0.5 * extra(i, j, m);
        low(i, j, m) = v;
      }
  const Matrix gbar_inv = inverse_metric(fv * g);
  Tensor out(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int m = 0; m < n; ++m) v += gbar_inv(l, m) * low(i, j, m);
        out(l, i, j) = v;
      }
  return out;
}

ConformalLawResiduals conformal_law_residuals(const QKTStructure& base, const QKTStructure& rescaled,
                                              const ConformalFactor& f, const Point& p) {
  const int n = base.n();
  const double h = base.scheme.h;
  const Box& box = base.data.patch.domain;
  const Tensor phi = as_one_form(f.log_gradient(p, h, box));
  const Tensor df = as_one_form(f.gradient(p, h, box));
  const auto J = structures_at(base.data, p);
  const Matrix g = base.data.g(p);

  const LeeData lee = lee_data(base.data, p, h);
  const LeeData lee_bar = lee_data(rescaled.data, p, h);
  const Sp1Forms sp = sp1_forms(base, p);
  const Sp1Forms sp_bar = sp1_forms(rescaled, p);
  const TorsionOneForms tf = torsion_one_forms(base, p);
  const TorsionOneForms tf_bar = torsion_one_forms(rescaled, p);

  ConformalLawResiduals r;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    const Matrix& ja = J[static_cast<std::size_t>(a)];
    const Matrix& jb = J[static_cast<std::size_t>(b)];
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    const auto ic = static_cast<std::size_t>(c);

    Tensor pred = wedge(j_one_form(ja, df), kaehler_form(g, ja));
    pred += f(p) * dc_kaehler_plus(base.data, a, p, h);
    r.dc_kaehler = std::max(r.dc_kaehler, max_abs_diff(dc_kaehler_plus(rescaled.data, a, p, h), pred));

    r.lee = std::max(r.lee, max_abs_diff(lee_bar.theta[ia], lee.theta[ia] + (2.0 * n - 1.0) * phi));
    r.cross_lee = std::max(r.cross_lee, max_abs_diff(lee_bar.cross[ia][ic], lee.cross[ia][ic] - j_one_form(jb, phi)));
    if (n >= 2)
      r.K = std::max(r.K, max_abs_diff(compute_K(rescaled.data, a, p, h),
                                       compute_K(base.data, a, p, h) - 2.0 * j_one_form(jb, phi)));
    r.omega = std::max(r.omega, max_abs_diff(sp_bar.omega[ia], sp.omega[ia] - j_one_form(ja, phi)));
    r.t = std::max(r.t, max_abs_diff(tf_bar.jt[ia], tf.jt[ia] - (2.0 * n + 1.0) * phi));

    const Tensor A = sp.omega[ib] + j_one_form(ja, sp.omega[ic]);
    const Tensor A_bar = sp_bar.omega[ib] + j_one_form(ja, sp_bar.omega[ic]);
    r.A = std::max(r.A, max_abs_diff(A, A_bar));
  }
  Tensor expected_T = f(p) * base.torsion_at(p);
  for (int a = 0; a < 3; ++a) expected_T += wedge(j_one_form(J[static_cast<std::size_t>(a)], df), kaehler_form(g, J[static_cast<std::size_t>(a)]));
  r.torsion = max_abs_diff(rescaled.torsion_at(p), expected_T);
  if (n >= 2) r.torsion = std::max(r.torsion, max_abs_diff(torsion_from_structure(rescaled.data, 0, p, h), expected_T));
  r.connection = max_abs_diff(rescaled.connection_at(p), rescaled_connection_direct(base, f, p));
  const double h2 = base.scheme.h2;
  r.dt_invariance = max_abs_diff(exterior_derivative_at(torsion_one_form_field(rescaled), p, h2, box),
                                 exterior_derivative_at(torsion_one_form_field(base), p, h2, box));
  return r;
}

LcqkResidual lcqk_residual(const QKTStructure& s, const Point& p) {
  const int n = s.n();
  const Matrix g = s.data.g(p);
  const TorsionOneForms tf = torsion_one_forms(s, p);
  Tensor shape(s.dim(), 3);
  for (int a = 0; a < 3; ++a)
    shape += wedge(tf.t_alpha[static_cast<std::size_t>(a)], kaehler_form(g, s.data.J(a, p)));
  shape *= 1.0 / (2.0 * n + 1.0);
  LcqkResidual r;
  r.torsion_shape = max_abs_diff(s.torsion_at(p), shape);
  r.dt = exterior_derivative_at(torsion_one_form_field(s), p, s.scheme.h2, s.data.patch.domain).max_abs();
  return r;
}

double lchkt_residual(const QKTStructure& s, const Point& p) {
  double r = 0.0;
  for (int alpha = 0; alpha < 3; ++alpha) {
    FormField defect{1, [&s, alpha](const Point& q) {
                       const LeeData lee = lee_data(s.data, q, s.scheme.h);
                       return hkt_defect(lee, structures_at(s.data, q), alpha);
                     }};
    r = std::max(r, exterior_derivative_at(defect, p, s.scheme.h2, s.data.patch.domain).max_abs());
  }
  return r;
}

}  // namespace qkt
