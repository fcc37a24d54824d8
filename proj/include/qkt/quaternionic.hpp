#pragma once

#include "qkt/tensor_core.hpp"

#include <array>

namespace qkt {

/// Three almost complex structures as (1,1) tensors; column b of J(p) is J e_b.
struct HypercomplexField {
  std::array<MatrixField, 3> J;

  Matrix operator()(int alpha, const Point& p) const { return J[static_cast<std::size_t>(alpha)](p); }
};

struct QuaternionicHermitianData {
  CoordinatePatch patch;
  HypercomplexField H;

  int n() const { return patch.n; }
  int dim() const { return patch.dim(); }
  Matrix g(const Point& p) const { return patch.metric_at(p); }
  Matrix J(int alpha, const Point& p) const { return H(alpha, p); }
};

/// Structure indices are 0-based; cyclic(a) = (a, a+1, a+2) mod 3.
inline std::array<int, 3> cyclic(int alpha) { return {alpha, (alpha + 1) % 3, (alpha + 2) % 3}; }

/// 4x4 blocks J1, J2 and J3 = J1 J2 repeated along the diagonal.
HypercomplexField build_standard_hypercomplex(int n);
std::array<Matrix, 3> standard_quaternion_units();

/// max over J_a^2 = -1, J1 J2 = J3, J2 J1 = -J3.
double quaternionic_residual(const std::array<Matrix, 3>& J);
/// max |J^T g J - g| over the three structures.
double hermitian_residual(const Matrix& g, const std::array<Matrix, 3>& J);
std::array<Matrix, 3> structures_at(const QuaternionicHermitianData& data, const Point& p);

/// F(X,Y) = g(X, J Y), i.e. the matrix g J.
Tensor kaehler_form(const Matrix& g, const Matrix& J);
Tensor kaehler_form(const QuaternionicHermitianData& data, int alpha, const Point& p);
FormField kaehler_form_field(const QuaternionicHermitianData& data, int alpha);

/// (Jψ)(X1..Xr) = (-1)^r ψ(J X1, .., J Xr).
Tensor j_action(const Matrix& J, const Tensor& psi);
/// ψ with J inserted into the listed slots.
Tensor eval_with_j(const Tensor& psi, const Matrix& J, std::initializer_list<int> slots);

/// M^{ab} = Σ_i e_i^a (J e_i)^b for an orthonormal frame e.
Matrix trace_matrix(const Matrix& g, const Matrix& J);

/// ¼[3ψ + ψ(JX,JY,Z) + ψ(JX,Y,JZ) + ψ(X,JY,JZ)].
Tensor project_plus_3form(const Tensor& psi, const Matrix& J);
/// Defect of ψ(X,Y,Z) = ψ(JX,JY,Z) + ψ(JX,Y,JZ) + ψ(X,JY,JZ).
double type_12_residual(const Tensor& psi, const Matrix& J);

/// Torsion as T(i,j,l) = T(∂i,∂j)^l; returns the (0,2) part in the same layout.
Tensor torsion_02_part(const Tensor& t12, const Matrix& J);
/// T(i,j,l) from the 3-form by raising the last slot.
Tensor torsion_vector_valued(const Tensor& t3, const Matrix& ginv);

Tensor exterior_derivative_kaehler(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);
Tensor lee_form(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);
Tensor cross_lee_form(const QuaternionicHermitianData& data, int alpha, int beta, const Point& p, double h);

/// -(dψ)(J_α·, .., J_α·) for a form field ψ of any degree.
Tensor dc_form(const QuaternionicHermitianData& data, int alpha, const FormField& psi, const Point& p, double h);
/// (d_α F_α)^+ w.r.t. J_α.
Tensor dc_kaehler_plus(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);

/// N(i,j,l) = N(∂i,∂j)^l from coordinate brackets of the J_α vector fields.
Tensor nijenhuis_bracket(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);

/// max over α of the type-(2,2) defect of a 4-form.
double dT_type22_residual(const Tensor& dT, const std::array<Matrix, 3>& J);
Tensor dT_type22_defect(const Tensor& dT, const Matrix& J);

struct TraceEqualities {
  double across_structures = 0.0;  // (dT)_1(X,J1Y) = (dT)_2(X,J2Y) = (dT)_3(X,J3Y)
  double hybrid = 0.0;             // (dT)_α(X,J_αY) = -(dT)_α(J_αX,Y)
};
TraceEqualities dT_trace_equalities(const Tensor& dT, const Matrix& g, const std::array<Matrix, 3>& J);

}  // namespace qkt
