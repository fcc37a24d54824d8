#pragma once

#include "qkt/quaternionic.hpp"

#include <optional>

namespace qkt {

/// A metric quaternionic connection with skew torsion, ∇ = ∇^g + ½T.
/// The torsion 3-form is the only stored datum; its (1,2) version is always
/// obtained by raising the last slot with g.
struct QKTStructure {
  QuaternionicHermitianData data;
  FormField torsion;
  FDScheme scheme;
  /// Torsion 1-form the structure was built from (dimension 4 only).
  std::optional<FormField> input_t;

  int n() const { return data.n(); }
  int dim() const { return data.dim(); }
  Tensor torsion_at(const Point& p) const { return torsion(p); }
  /// Γ(l,i,j) of ∇, with the Levi-Civita part differentiated at step h.
  Tensor connection_at(const Point& p) const;
  ConnectionField connection() const;
  /// (∇_i J_α)^a_b stored as out(i,a,b).
  Tensor nabla_J(int alpha, const Point& p) const;
};

/// J_β θ_α etc. for the triple (α, β, γ): the 1-form -ψ(J·).
Tensor j_one_form(const Matrix& J, const Tensor& psi);

Tensor compute_K(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);
double existence_residual(const QuaternionicHermitianData& data, const Point& p, double h);
/// Torsion 3-form predicted by the formula for ∇ using structure `alpha`.
Tensor torsion_from_structure(const QuaternionicHermitianData& data, int alpha, const Point& p, double h);

/// Builds the unique QKT connection for n >= 2. The existence condition is
/// checked at `checkpoints` (the domain centre when empty); failure throws
/// NotQKTError with the largest residual seen.
QKTStructure build_qkt(const QuaternionicHermitianData& data, const FDScheme& scheme,
                       const std::vector<Point>& checkpoints = {}, double existence_tolerance = 1e-4);
/// Dimension 4: T = *t.
QKTStructure build_qkt_dim4(const CoordinatePatch& patch, const HypercomplexField& H, const FormField& t,
                            const FDScheme& scheme);

struct TorsionOneForms {
  std::array<Tensor, 3> t_alpha;
  std::array<Tensor, 3> jt;  // J_α t_α
  Tensor t;                  // mean of the three J_α t_α
  double agreement = 0.0;    // max_αβ |J_α t_α - J_β t_β|
};
TorsionOneForms torsion_one_forms(const QKTStructure& s, const Point& p);
FormField torsion_one_form_field(const QKTStructure& s);

struct Sp1Forms {
  std::array<Tensor, 3> omega;
  /// max over α of |∇J_α + ω_β J_γ - ω_γ J_β| with the fitted ω.
  double fit_residual = 0.0;
};
/// Least-squares extraction of ω from ∇J_α = -ω_β J_γ + ω_γ J_β.
Sp1Forms sp1_forms(const QKTStructure& s, const Point& p);
/// The closed formula in terms of Lee forms (n >= 2).
std::array<Tensor, 3> sp1_forms_from_lee(const QuaternionicHermitianData& data, const Point& p, double h);

struct LeeData {
  std::array<Tensor, 3> theta;
  std::array<std::array<Tensor, 3>, 3> cross;  // cross[α][β] = θ_{α,β}
};
LeeData lee_data(const QuaternionicHermitianData& data, const Point& p, double h);

struct AuxiliaryOneForms {
  std::array<Tensor, 3> K;        // empty tensors when n = 1
  std::array<Tensor, 3> A;        // ω_β + J_α ω_γ
  std::array<Tensor, 3> A_lee;    // J_β(θ_γ - θ_β)
  std::array<Tensor, 3> C;        // ω_β - J_α ω_γ
  std::array<Tensor, 3> t_alpha;
  Tensor t;
};
AuxiliaryOneForms auxiliary_one_forms(const QKTStructure& s, const Point& p);

/// HKT test 1-form θ_α - J_β θ_{α,γ}.
Tensor hkt_defect(const LeeData& lee, const std::array<Matrix, 3>& J, int alpha);
/// The same with the cross Lee indices swapped, θ_α - J_β θ_{γ,α}.
Tensor hkt_defect_swapped(const LeeData& lee, const std::array<Matrix, 3>& J, int alpha);

struct Classification {
  bool is_hkt = false;
  double hkt_residual = 0.0;
  bool is_integrable = false;
  double integrable_residual = 0.0;
  bool is_parallel_torsion = false;
  double parallel_torsion_residual = 0.0;
  bool is_strong = false;
  double strong_residual = 0.0;
  double dT_type22 = 0.0;
};
struct ClassificationTolerances {
  double first_level = 1e-5;
  double curvature_level = 1e-3;
};
Classification classify(const QKTStructure& s, const std::vector<Point>& points,
                        const ClassificationTolerances& tol = {});

/// N_α(X,Y) = A(Y)J_βX - A(X)J_βY - (J_αA)(Y)J_γX + (J_αA)(X)J_γY with A = J_β(θ_γ - θ_β).
Tensor nijenhuis_via_connection(const QKTStructure& s, int alpha, const Point& p);
Tensor nijenhuis_from_A(const Tensor& A, const std::array<Matrix, 3>& J, int alpha);

/// ∇T of the QKT connection at step h2, out(x, y, z, u) = (∇_x T)(y, z, u).
Tensor nabla_torsion(const QKTStructure& s, const Point& p);
/// Same for the Levi-Civita connection.
Tensor nabla_g_torsion(const QKTStructure& s, const Point& p);
/// dT at step h2.
Tensor torsion_exterior_derivative(const QKTStructure& s, const Point& p);

/// max |∇g| for the QKT connection.
double metricity_residual(const QKTStructure& s, const Point& p);
/// max over α of |T^{0,2}_α|.
double torsion_purity_residual(const QKTStructure& s, const Point& p);
/// Skewness of T recovered as g(2(∇ - ∇^g)(X,Y), Z).
double torsion_skew_residual(const QKTStructure& s, const Point& p);

}  // namespace qkt
