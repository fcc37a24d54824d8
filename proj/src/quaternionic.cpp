#include "qkt/quaternionic.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

std::array<Matrix, 3> standard_quaternion_units() {
  Matrix j1 = Matrix::Zero(4, 4);
  Matrix j2 = Matrix::Zero(4, 4);
  j1(1, 0) = 1;
  j1(0, 1) = -1;
  j1(3, 2) = 1;
  j1(2, 3) = -1;
  j2(2, 0) = 1;
  j2(0, 2) = -1;
  j2(3, 1) = -1;
  j2(1, 3) = 1;
  return {j1, j2, j1 * j2};
}

HypercomplexField build_standard_hypercomplex(int n) {
  if (n < 1) throw DimensionError("quaternionic dimension must be positive");
  const auto units = standard_quaternion_units();
  HypercomplexField h;
  for (int a = 0; a < 3; ++a) {
    Matrix big = Matrix::Zero(4 * n, 4 * n);
    for (int k = 0; k < n; ++k) big.block(4 * k, 4 * k, 4, 4) = units[static_cast<std::size_t>(a)];
    h.J[static_cast<std::size_t>(a)] = [big](const Point&) { return big; };
  }
  return h;
}

double quaternionic_residual(const std::array<Matrix, 3>& J) {
  const Matrix id = Matrix::Identity(J[0].rows(), J[0].cols());
  double r = 0.0;
  for (const Matrix& j : J) r = std::max(r, (j * j + id).cwiseAbs().maxCoeff());
  r = std::max(r, (J[0] * J[1] - J[2]).cwiseAbs().maxCoeff());
  r = std::max(r, (J[1] * J[0] + J[2]).cwiseAbs().maxCoeff());
  return r;
}

double hermitian_residual(const Matrix& g, const std::array<Matrix, 3>& J) {
  double r = 0.0;
  for (const Matrix& j : J) r = std::max(r, (j.transpose() * g * j - g).cwiseAbs().maxCoeff());
  return r;
}

std::array<Matrix, 3> structures_at(const QuaternionicHermitianData& data, const Point& p) {
  return {data.J(0, p), data.J(1, p), data.J(2, p)};
}

Tensor kaehler_form(const Matrix& g, const Matrix& J) { return Tensor::from_matrix(g * J); }

Tensor kaehler_form(const QuaternionicHermitianData& data, int alpha, const Point& p) {
  return kaehler_form(data.g(p), data.J(alpha, p));
}

FormField kaehler_form_field(const QuaternionicHermitianData& data, int alpha) {
  // Unchecked metric: this is evaluated inside FD stencils.
  return FormField{2, [data, alpha](const Point& p) {
                     return Tensor::from_matrix(data.patch.metric(p) * data.J(alpha, p));
                   }};
}

Tensor eval_with_j(const Tensor& psi, const Matrix& J, std::initializer_list<int> slots) {
  return apply_to_slots(psi, J, std::span<const int>(slots.begin(), slots.size()));
}

Tensor j_action(const Matrix& J, const Tensor& psi) {
  std::vector<int> slots(static_cast<std::size_t>(psi.rank()));
  for (int i = 0; i < psi.rank(); ++i) slots[static_cast<std::size_t>(i)] = i;
  Tensor out = apply_to_slots(psi, J, slots);
  if (psi.rank() % 2) out *= -1.0;
  return out;
}

Matrix trace_matrix(const Matrix& g, const Matrix& J) {
  const Matrix e = orthonormal_frame(g);
  return e * (J * e).transpose();
}

Tensor project_plus_3form(const Tensor& psi, const Matrix& J) {
  Tensor out = 3.0 * psi;
  out += eval_with_j(psi, J, {0, 1});
  out += eval_with_j(psi, J, {0, 2});
  out += eval_with_j(psi, J, {1, 2});
  out *= 0.25;
  return out;
}

double type_12_residual(const Tensor& psi, const Matrix& J) {
  Tensor d = psi;
  d -= eval_with_j(psi, J, {0, 1});
  d -= eval_with_j(psi, J, {0, 2});
  d -= eval_with_j(psi, J, {1, 2});
  return d.max_abs();
}

Tensor torsion_vector_valued(const Tensor& t3, const Matrix& ginv) {
  Tensor out = eval_with_j(t3, ginv, {2});
  out.set_signature({Variance::Covariant, Variance::Covariant, Variance::Contravariant});
  return out;
}

Tensor torsion_02_part(const Tensor& t12, const Matrix& J) {
  // Applying J to the vector slot: (J v)^l = J(l,m) v^m.
  const Matrix jt = J.transpose();
  Tensor out = t12;
  out -= eval_with_j(t12, J, {0, 1});
  out += eval_with_j(eval_with_j(t12, J, {0}), jt, {2});
  out += eval_with_j(eval_with_j(t12, J, {1}), jt, {2});
  out *= 0.25;
  return out;
}

Tensor exterior_derivative_kaehler(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  return exterior_derivative_at(kaehler_form_field(data, alpha), p, h, data.patch.domain);
}

Tensor lee_form(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  const Tensor delta_f = codifferential_at(kaehler_form_field(data, alpha), data.patch, p, h);
  return eval_with_j(delta_f, data.J(alpha, p), {0});
}

Tensor cross_lee_form(const QuaternionicHermitianData& data, int alpha, int beta, const Point& p, double h) {
  const Matrix g = data.g(p);
  const Tensor dfp = project_plus_3form(exterior_derivative_kaehler(data, alpha, p, h), data.J(alpha, p));
  Tensor out = contract_last_two(dfp, trace_matrix(g, data.J(beta, p)));
  out *= -0.5;
  return out;
}

Tensor dc_form(const QuaternionicHermitianData& data, int alpha, const FormField& psi, const Point& p, double h) {
  const Tensor dpsi = exterior_derivative_at(psi, p, h, data.patch.domain);
  std::vector<int> slots(static_cast<std::size_t>(dpsi.rank()));
  for (int i = 0; i < dpsi.rank(); ++i) slots[static_cast<std::size_t>(i)] = i;
  Tensor out = apply_to_slots(dpsi, data.J(alpha, p), slots);
  out *= -1.0;
  return out;
}

Tensor dc_kaehler_plus(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  return project_plus_3form(dc_form(data, alpha, kaehler_form_field(data, alpha), p, h), data.J(alpha, p));
}

Tensor nijenhuis_bracket(const QuaternionicHermitianData& data, int alpha, const Point& p, double h) {
  const int n = data.dim();
  const Matrix J = data.J(alpha, p);
  const Tensor dj = gradient(as_tensor_field(data.H.J[static_cast<std::size_t>(alpha)]), p, h, data.patch.domain);
  Tensor out(n, {Variance::Covariant, Variance::Covariant, Variance::Contravariant});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          s += J(a, i) * dj(a, l, j) - J(a, j) * dj(a, l, i);
          s += J(l, a) * dj(j, a, i) - J(l, a) * dj(i, a, j);
        }
        out(i, j, l) = s;
      }
  return out;
}

Tensor dT_type22_defect(const Tensor& dT, const Matrix& J) {
  Tensor d = dT;
  d -= eval_with_j(dT, J, {0, 1});
  d -= eval_with_j(dT, J, {0, 2});
  d -= eval_with_j(dT, J, {1, 2});
  return d;
}

double dT_type22_residual(const Tensor& dT, const std::array<Matrix, 3>& J) {
  double r = 0.0;
  for (const Matrix& j : J) r = std::max(r, dT_type22_defect(dT, j).max_abs());
  return r;
}

TraceEqualities dT_trace_equalities(const Tensor& dT, const Matrix& g, const std::array<Matrix, 3>& J) {
  std::array<Matrix, 3> twisted;
  TraceEqualities out;
  for (int a = 0; a < 3; ++a) {
    const Matrix& ja = J[static_cast<std::size_t>(a)];
    const Matrix tr = contract_last_two(dT, trace_matrix(g, ja)).to_matrix();
    twisted[static_cast<std::size_t>(a)] = tr * ja;
    out.hybrid = std::max(out.hybrid, (tr * ja + ja.transpose() * tr).cwiseAbs().maxCoeff());
  }
  for (int a = 0; a < 3; ++a)
    out.across_structures = std::max(
        out.across_structures,
        (twisted[static_cast<std::size_t>(a)] - twisted[static_cast<std::size_t>((a + 1) % 3)]).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace qkt
