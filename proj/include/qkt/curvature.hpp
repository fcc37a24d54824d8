#pragma once

#include "qkt/qkt_connection.hpp"

namespace qkt {

enum class CurvatureSource { QKT, LeviCivita, Weyl, Other };

struct CurvatureValue {
  /// R^l_{kij} stored as up(l, k, i, j); R(∂i,∂j)∂k = R^l_{kij}∂l.
  Tensor up;
  /// R(X,Y,Z,V) = g(R(X,Y)Z, V) stored as low(x, y, z, v).
  Tensor low;
  CurvatureSource source = CurvatureSource::Other;

  /// max |R(X,Y,..) + R(Y,X,..)| and max |R(..,Z,V) + R(..,V,Z)|.
  double antisymmetry_xy() const;
  double antisymmetry_zv() const;
};

/// Curvature of a connection field; Γ is differentiated at step h2.
CurvatureValue curvature_tensor(const ConnectionField& conn, const Matrix& g, const Point& p, double h2,
                                const Box& domain, CurvatureSource source = CurvatureSource::Other);
CurvatureValue qkt_curvature(const QKTStructure& s, const Point& p);
CurvatureValue levi_civita_curvature(const QKTStructure& s, const Point& p);

/// ρ_α(X,Y) = ½ Σ R(X,Y,e_i,J_α e_i).
std::array<Tensor, 3> ricci_forms(const CurvatureValue& R, const Matrix& g, const std::array<Matrix, 3>& J);
/// Ric(X,Y) = Σ R(e_i,X,Y,e_i).
Matrix ricci_tensor(const CurvatureValue& R, const Matrix& g);
double trace_g(const Matrix& b, const Matrix& g);
Matrix sym(const Matrix& m);
Matrix skew(const Matrix& m);

/// Everything the residual suites need at one point, computed once.
struct PointGeometry {
  Point p;
  Matrix g;
  Matrix ginv;
  std::array<Matrix, 3> J;
  std::array<Matrix, 3> M;  // trace matrices
  Tensor T;                 // torsion 3-form
  Tensor gTT;               // g(T(X,Y),T(Z,U))
  Tensor nablaT;            // (∇_x T)(y,z,u)
  Tensor nablaGT;           // (∇^g_x T)(y,z,u)
  Tensor dT;
  CurvatureValue R;
  CurvatureValue Rg;
  std::array<Tensor, 3> rho;
  Matrix ric;
  Matrix ric_g;
};
PointGeometry point_geometry(const QKTStructure& s, const Point& p);

struct Sp1CurvatureResiduals {
  double commutator = 0.0;        // [R(X,Y), J_α] = (1/n)(ρ_γ J_β - ρ_β J_γ)
  double ricci_form = 0.0;        // ρ_α = n (dω_α + ω_β ∧ ω_γ)
  double ricci_form_unscaled = 0.0;  // the same without the factor n
};
Sp1CurvatureResiduals sp1_curvature_residuals(const QKTStructure& s, const PointGeometry& pg);

struct BianchiResiduals {
  double lc_vs_qkt_torsion_derivative = 0.0;  // ∇^g T = ∇T + ½ σ g(T,T)
  double dT_expansion = 0.0;
  double first_bianchi = 0.0;
  double lc_curvature = 0.0;
  double pair_difference = 0.0;  // D = R - R(Z,U,X,Y)
  double ricci_skew = 0.0;       // Ric(X,Y) - Ric(Y,X) + δT(X,Y)
  double curvature_antisymmetry = 0.0;
};
BianchiResiduals bianchi_and_symmetry_residuals(const QKTStructure& s, const PointGeometry& pg);

struct TraceIdentityResiduals {
  double mixed_trace = 0.0;   // n ρ_α(X,J_αY) + ρ_β(X,J_βY) + ρ_γ(X,J_γY) = ...
  double single_trace = 0.0;  // (n-1) ρ_α(X,J_αY) = ...  (n >= 2, else 0)
  double lambda = 0.0;        // least-squares fit ρ_α(X,J_αY) ≈ λ g(X,Y)
  double lambda_fit = 0.0;
  double type22 = 0.0;
  TraceEqualities dT_traces;
};
TraceIdentityResiduals trace_identity_residuals(const QKTStructure& s, const PointGeometry& pg);

struct Dim4Residuals {
  double K_formula = 0.0;      // K = -Ric + ∇^g t - (δt/2) g
  double skew_ricci = 0.0;     // Skew(Ric) = -¼⟨dt,F_α⟩F_α + ½ dt(J_α·,J_α·)
  double lc_ricci = 0.0;       // Ric^g = Sym(Ric) + ½(|t|²g - t⊗t)
  double einstein_deviation = 0.0;
  double sp1_einstein_deviation = 0.0;
  double scal = 0.0;
  double scal_K = 0.0;
  double skew_ricci_norm = 0.0;
  double dt_norm = 0.0;
  Matrix K;
};
Dim4Residuals dim4_einstein_suite(const QKTStructure& s, const PointGeometry& pg);

struct WeylResiduals {
  double weyl_metric = 0.0;       // ∇^W g + t⊗g
  double sym_ricci_sum = 0.0;     // Sym(Ric^W) + Sym(K)
  double sym_ricci_formula = 0.0; // Sym(Ric^W) = Ric^g - Sym(∇^g t) - ½(|t|²g - t⊗t) + (δt/2) g
  double einstein_weyl_deviation = 0.0;
  double sp1_einstein_deviation = 0.0;
};
ConnectionField weyl_connection(const QKTStructure& s);
WeylResiduals weyl_correspondence(const QKTStructure& s, const PointGeometry& pg);

/// Parallel torsion in dimension 4 in terms of ∇t:
/// (∇_Z T)(X,Y,U) = F_α(Y,U)(∇_Z t)J_αX + F_α(X,Y)(∇_Z t)J_αU + F_α(U,X)(∇_Z t)J_αY and
/// Σ (∇_Z T)(J_αX,e_i,J_αe_i) = 2(∇_Z t)X.
struct ParallelTorsionResiduals {
  double expansion = 0.0;
  double trace = 0.0;
  double nabla_t = 0.0;   // max |∇t|
  double nabla_g_t = 0.0; // max |∇^g t|
};
ParallelTorsionResiduals parallel_torsion_residuals(const QKTStructure& s, const PointGeometry& pg);

}  // namespace qkt
