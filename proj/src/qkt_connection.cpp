#include "qkt/qkt_connection.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

namespace {

const Matrix& at3(const std::array<Matrix, 3>& a, int i) { return a[static_cast<std::size_t>(i)]; }
const Tensor& at3(const std::array<Tensor, 3>& a, int i) { return a[static_cast<std::size_t>(i)]; }

Tensor add_half_torsion(Tensor gamma, const Tensor& t3, const Matrix& ginv) {
  const int n = t3.dim();
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += ginv(l, m) * t3(i, j, m);
        gamma(l, i, j) += 0.5 * s;
      }
  return gamma;
}

Tensor one_form_outer_matrix(const Tensor& w, const Matrix& m) {
  const int n = w.dim();
  Tensor out(n, {Variance::Covariant, Variance::Contravariant, Variance::Covariant});
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out(i, a, b) = w(i) * m(a, b);
  return out;
}

}  // namespace

Tensor QKTStructure::connection_at(const Point& p) const {
  const Matrix ginv = inverse_metric(data.patch.metric(p));
  return add_half_torsion(levi_civita(data.patch, p, scheme.h), torsion(p), ginv);
}

ConnectionField QKTStructure::connection() const {
  return [s = *this](const Point& p) { return s.connection_at(p); };
}

Tensor QKTStructure::nabla_J(int alpha, const Point& p) const {
  TensorField jf = [this, alpha](const Point& q) {
    Tensor t = Tensor::from_matrix(data.J(alpha, q));
    t.set_signature({Variance::Contravariant, Variance::Covariant});
    return t;
  };
  return covariant_derivative(connection_at(p), jf, p, scheme.h, data.patch.domain);
}

Tensor j_one_form(const Matrix& J, const Tensor& psi) { return j_action(J, psi); }

Tensor compute_K(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  const int n = data.n();
  if (n < 2) throw DimensionError("K_alpha is defined for n >= 2 only");
  const auto [a, b, c] = cyclic(alpha);
  Tensor k = j_one_form(data.J(b, p), lee_form(data, a, p, h));
  k += cross_lee_form(data, a, c, p, h);
  k *= 1.0 / (1.0 - n);
  return k;
}

double existence_residual(const QuaternionicHermitianData& data, const Point& p, double h) {
  if (data.n() < 2) throw DimensionError("the existence condition is stated for n >= 2");
  std::array<Tensor, 3> K;
  std::array<Tensor, 3> dcp;
  std::array<Tensor, 3> F;
  const auto J = structures_at(data, p);
  const Matrix g = data.g(p);
  for (int a = 0; a < 3; ++a) {
    K[static_cast<std::size_t>(a)] = compute_K(data, a, p, h);
    dcp[static_cast<std::size_t>(a)] = dc_kaehler_plus(data, a, p, h);
    F[static_cast<std::size_t>(a)] = kaehler_form(g, at3(J, a));
  }
  double r = 0.0;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    Tensor lhs = at3(dcp, a) - at3(dcp, b);
    Tensor rhs = wedge(at3(K, a), at3(F, b));
    rhs -= wedge(j_one_form(at3(J, b), at3(K, b)), at3(F, a));
    rhs -= wedge(at3(K, b) - j_one_form(at3(J, a), at3(K, a)), at3(F, c));
    rhs *= 0.5;
    r = std::max(r, max_abs_diff(lhs, rhs));
  }
  return r;
}

Tensor torsion_from_structure(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  const auto [a, b, c] = cyclic(alpha);
  const Matrix g = data.g(p);
  const Matrix ja = data.J(a, p);
  const Tensor ka = compute_K(data, a, p, h);
  Tensor corr = wedge(j_one_form(ja, ka), kaehler_form(g, data.J(c, p)));
  corr += wedge(ka, kaehler_form(g, data.J(b, p)));
  Tensor t = dc_kaehler_plus(data, a, p, h);
  corr *= 0.5;
  t -= corr;
  return t;
}

QKTStructure build_qkt(const QuaternionicHermitianData& data, const FDScheme& scheme,
                       const std::vector<Point>& checkpoints, double existence_tolerance) {
  if (data.n() < 2) throw DimensionError("build_qkt requires n >= 2; use build_qkt_dim4");
  data.patch.validate();
  scheme.validate();
  std::vector<Point> pts = checkpoints;
  if (pts.empty()) pts.push_back(0.5 * (data.patch.domain.lower + data.patch.domain.upper));
  double worst = 0.0;
  for (const Point& p : pts) worst = std::max(worst, existence_residual(data, p, scheme.h));
  if (!(worst <= existence_tolerance))
    throw NotQKTError("existence condition fails: residual " + std::to_string(worst), worst);
  const double h = scheme.h;
  FormField torsion{3, [data, h](const Point& p) { return torsion_from_structure(data, 0, p, h); }};
  return QKTStructure{data, torsion, scheme, std::nullopt};
}

QKTStructure build_qkt_dim4(const CoordinatePatch& patch, const HypercomplexField& H, const FormField& t,
                            const FDScheme& scheme) {
  if (patch.n != 1) throw DimensionError("build_qkt_dim4 requires real dimension 4");
  if (t.degree != 1) throw DegreeOverflowError("torsion 1-form must have degree 1");
  patch.validate();
  scheme.validate();
  FormField torsion{3, [patch, t](const Point& p) {
                      return hodge_star_4d(t(p), patch.metric(p), patch.orientation);
                    }};
  return QKTStructure{QuaternionicHermitianData{patch, H}, torsion, scheme, t};
}

TorsionOneForms torsion_one_forms(const QKTStructure& s, const Point& p) {
  const Tensor T = s.torsion_at(p);
  const Matrix g = s.data.g(p);
  TorsionOneForms out;
  out.t = Tensor(s.dim(), 1);
  for (int a = 0; a < 3; ++a) {
    const Matrix J = s.data.J(a, p);
    Tensor ta = contract_last_two(T, trace_matrix(g, J));
    ta *= -0.5;
    out.jt[static_cast<std::size_t>(a)] = j_one_form(J, ta);
    out.t_alpha[static_cast<std::size_t>(a)] = std::move(ta);
    out.t += out.jt[static_cast<std::size_t>(a)];
  }
  out.t *= 1.0 / 3.0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      out.agreement = std::max(out.agreement, max_abs_diff(at3(out.jt, a), at3(out.jt, b)));
  return out;
}

FormField torsion_one_form_field(const QKTStructure& s) {
  return FormField{1, [s](const Point& p) { return torsion_one_forms(s, p).t; }};
}

Sp1Forms sp1_forms(const QKTStructure& s, const Point& p) {
  const int n = s.dim();
  const auto J = structures_at(s.data, p);
  std::array<Tensor, 3> nj;
  for (int a = 0; a < 3; ++a) nj[static_cast<std::size_t>(a)] = s.nabla_J(a, p);
  Sp1Forms out;
  for (auto& w : out.omega) w = Tensor(n, 1);
  const std::size_t nn = static_cast<std::size_t>(n * n);
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    // Columns J_β, J_γ; coefficient on J_β is ω_γ, on J_γ it is -ω_β.
    Eigen::Matrix<double, Eigen::Dynamic, 2> basis(static_cast<Eigen::Index>(nn), 2);
    basis.col(0) = Eigen::Map<const Eigen::VectorXd>(at3(J, b).data(), static_cast<Eigen::Index>(nn));
    basis.col(1) = Eigen::Map<const Eigen::VectorXd>(at3(J, c).data(), static_cast<Eigen::Index>(nn));
    const Eigen::Matrix2d normal = basis.transpose() * basis;
    if (std::abs(normal.determinant()) < 1e-12) throw LinearAlgebraError("sp(1) extraction system is singular");
    const auto& NJ = at3(nj, a);
    for (int i = 0; i < n; ++i) {
      // Flatten ∇_i J_α column-major, like the Eigen storage of the basis.
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(nn));
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) rhs(y * n + x) = NJ(i, x, y);
      const Eigen::Vector2d coef = normal.ldlt().solve(basis.transpose() * rhs);
      out.omega[static_cast<std::size_t>(c)](i) += 0.5 * coef(0);
      out.omega[static_cast<std::size_t>(b)](i) -= 0.5 * coef(1);
    }
  }
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    Tensor pred = one_form_outer_matrix(at3(out.omega, c), at3(J, b));
    pred -= one_form_outer_matrix(at3(out.omega, b), at3(J, c));
    out.fit_residual = std::max(out.fit_residual, max_abs_diff(at3(nj, a), pred));
  }
  return out;
}

LeeData lee_data(const QuaternionicHermitianData& data, const Point& p, double h) {
  LeeData out;
  for (int a = 0; a < 3; ++a) {
    out.theta[static_cast<std::size_t>(a)] = lee_form(data, a, p, h);
    for (int b = 0; b < 3; ++b)
      out.cross[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = cross_lee_form(data, a, b, p, h);
  }
  return out;
}

std::array<Tensor, 3> sp1_forms_from_lee(const QuaternionicHermitianData& data, const Point& p, double h) {
  const int n = data.n();
  if (n < 2) throw DimensionError("the Lee-form expression for the sp(1) forms needs n >= 2");
  const LeeData lee = lee_data(data, p, h);
  std::array<Tensor, 3> out;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    Tensor inner = at3(lee.theta, c) - at3(lee.theta, b);
    inner += (1.0 / (1.0 - n)) * at3(lee.theta, a);
    Tensor w = 0.5 * j_one_form(data.J(b, p), inner);
    w += (1.0 / (2.0 * (1.0 - n))) * lee.cross[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(b)] = std::move(w);
  }
  return out;
}

AuxiliaryOneForms auxiliary_one_forms(const QKTStructure& s, const Point& p) {
  const double h = s.scheme.h;
  const auto J = structures_at(s.data, p);
  const Sp1Forms sp = sp1_forms(s, p);
  const LeeData lee = lee_data(s.data, p, h);
  const TorsionOneForms tf = torsion_one_forms(s, p);
  AuxiliaryOneForms out;
  for (int alpha = 0; alpha < 3; ++alpha) {
    const auto [a, b, c] = cyclic(alpha);
    if (s.n() >= 2) out.K[static_cast<std::size_t>(a)] = compute_K(s.data, a, p, h);
    out.A[static_cast<std::size_t>(a)] = at3(sp.omega, b) + j_one_form(at3(J, a), at3(sp.omega, c));
    out.C[static_cast<std::size_t>(a)] = at3(sp.omega, b) - j_one_form(at3(J, a), at3(sp.omega, c));
    out.A_lee[static_cast<std::size_t>(a)] = j_one_form(at3(J, b), at3(lee.theta, c) - at3(lee.theta, b));
  }
  out.t_alpha = tf.t_alpha;
  out.t = tf.t;
  return out;
}

Tensor hkt_defect(const LeeData& lee, const std::array<Matrix, 3>& J, int alpha) {
  const auto [a, b, c] = cyclic(alpha);
  return at3(lee.theta, a) -
         j_one_form(at3(J, b), lee.cross[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]);
}

Tensor hkt_defect_swapped(const LeeData& lee, const std::array<Matrix, 3>& J, int alpha) {
  const auto [a, b, c] = cyclic(alpha);
  return at3(lee.theta, a) -
         j_one_form(at3(J, b), lee.cross[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)]);
}

Tensor nabla_torsion(const QKTStructure& s, const Point& p) {
  return covariant_derivative(s.connection_at(p), s.torsion.eval, p, s.scheme.h2, s.data.patch.domain);
}

Tensor nabla_g_torsion(const QKTStructure& s, const Point& p) {
  return covariant_derivative(levi_civita(s.data.patch, p, s.scheme.h), s.torsion.eval, p, s.scheme.h2,
                              s.data.patch.domain);
}

Tensor torsion_exterior_derivative(const QKTStructure& s, const Point& p) {
  return exterior_derivative_at(s.torsion, p, s.scheme.h2, s.data.patch.domain);
}

Classification classify(const QKTStructure& s, const std::vector<Point>& points, const ClassificationTolerances& tol) {
  Classification out;
  for (const Point& p : points) {
    const auto J = structures_at(s.data, p);
    const LeeData lee = lee_data(s.data, p, s.scheme.h);
    if (s.n() >= 2) {
      for (int a = 0; a < 3; ++a) out.hkt_residual = std::max(out.hkt_residual, hkt_defect(lee, J, a).max_abs());
    } else {
      // In dimension 4 the Lee-form test degenerates; HKT means ω = 0.
      for (const Tensor& w : sp1_forms(s, p).omega) out.hkt_residual = std::max(out.hkt_residual, w.max_abs());
    }
    for (int a = 0; a < 3; ++a)
      out.integrable_residual =
          std::max(out.integrable_residual, max_abs_diff(at3(lee.theta, a), at3(lee.theta, (a + 1) % 3)));
    out.parallel_torsion_residual = std::max(out.parallel_torsion_residual, nabla_torsion(s, p).max_abs());
    const Tensor dT = torsion_exterior_derivative(s, p);
    out.strong_residual = std::max(out.strong_residual, dT.max_abs());
    out.dT_type22 = std::max(out.dT_type22, dT_type22_residual(dT, J));
  }
  out.is_hkt = out.hkt_residual <= tol.first_level;
  out.is_integrable = out.integrable_residual <= tol.first_level;
  out.is_parallel_torsion = out.parallel_torsion_residual <= tol.curvature_level;
  out.is_strong = out.strong_residual <= tol.curvature_level;
  return out;
}

Tensor nijenhuis_from_A(const Tensor& A, const std::array<Matrix, 3>& J, int alpha) {
  const auto [a, b, c] = cyclic(alpha);
  const int n = A.dim();
  const Tensor ja = j_one_form(at3(J, a), A);
  const Matrix& jb = at3(J, b);
  const Matrix& jc = at3(J, c);
  Tensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Contravariant});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        out(i, j, l) = A(j) * jb(l, i) - A(i) * jb(l, j) - ja(j) * jc(l, i) + ja(i) * jc(l, j);
  return out;
}

Tensor nijenhuis_via_connection(const QKTStructure& s, int alpha, const Point& p) {
  const auto J = structures_at(s.data, p);
  const auto [a, b, c] = cyclic(alpha);
  const Tensor A = j_one_form(at3(J, b), lee_form(s.data, c, p, s.scheme.h) - lee_form(s.data, b, p, s.scheme.h));
  return nijenhuis_from_A(A, J, a);
}

double metricity_residual(const QKTStructure& s, const Point& p) {
  return covariant_derivative(s.connection_at(p), as_tensor_field(s.data.patch.metric), p, s.scheme.h,
                              s.data.patch.domain)
      .max_abs();
}

double torsion_purity_residual(const QKTStructure& s, const Point& p) {
  const Tensor t12 = torsion_vector_valued(s.torsion_at(p), inverse_metric(s.data.g(p)));
  double r = 0.0;
  for (int a = 0; a < 3; ++a) r = std::max(r, torsion_02_part(t12, s.data.J(a, p)).max_abs());
  return r;
}

double torsion_skew_residual(const QKTStructure& s, const Point& p) {
  const Matrix g = s.data.g(p);
  const Tensor diff = s.connection_at(p) - levi_civita(s.data.patch, p, s.scheme.h);
  const int n = s.dim();
  Tensor t3(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += 2.0 * diff(l, i, j) * g(l, m);
        t3(i, j, m) = acc;
      }
  return antisymmetry_residual(t3);
}

}  // namespace qkt
