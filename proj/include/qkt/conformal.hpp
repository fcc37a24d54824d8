#pragma once

#include "qkt/qkt_connection.hpp"

namespace qkt {

struct ConformalFactor {
  ScalarField f;

  double operator()(const Point& p) const { return f(p); }
  Vector gradient(const Point& p, double h, const Box& domain) const { return qkt::gradient(f, p, h, domain); }
  /// d ln f.
  Vector log_gradient(const Point& p, double h, const Box& domain) const;
};

/// Rescales to f·g with the same J_α and T̄ = fT + Σ_α J_α df ∧ F_α. Throws
/// DomainError if f < 1e-8 at the domain centre, at a checkpoint, or later at
/// any evaluation point.
QKTStructure conformal_rescale(const QKTStructure& s, const ConformalFactor& f,
                               const std::vector<Point>& checkpoints = {});

/// Connection coefficients of the rescaled structure obtained by lowering with
/// f·g the explicit formula relating ∇̄ to ∇ and df.
Tensor rescaled_connection_direct(const QKTStructure& s, const ConformalFactor& f, const Point& p);

struct ConformalLawResiduals {
  double dc_kaehler = 0.0;   // (d_α F̄_α)^+ = J_α df ∧ F_α + f (d_α F_α)^+
  double lee = 0.0;          // θ̄_α = θ_α + (2n-1) d ln f
  double cross_lee = 0.0;    // θ̄_{α,γ} = θ_{α,γ} - J_β d ln f
  double K = 0.0;            // K̄_α = K_α - 2 J_β d ln f  (n >= 2)
  double omega = 0.0;        // ω̄_α = ω_α - J_α d ln f
  double torsion = 0.0;      // T̄ = fT + Σ J_α df ∧ F_α against the rebuilt structure (n >= 2)
  double connection = 0.0;   // rescaled ∇̄ against the explicit formula
  double t = 0.0;            // t̄ = t - (2n+1) d ln f
  double A = 0.0;            // Ā_α = A_α
  double dt_invariance = 0.0;
};

/// Compares `base` and `rescaled = conformal_rescale(base, f)` at p.
ConformalLawResiduals conformal_law_residuals(const QKTStructure& base, const QKTStructure& rescaled,
                                              const ConformalFactor& f, const Point& p);

struct LcqkResidual {
  double torsion_shape = 0.0;  // |T - (1/(2n+1)) Σ t_α ∧ F_α|
  double dt = 0.0;
  double value() const { return std::max(torsion_shape, dt); }
};
LcqkResidual lcqk_residual(const QKTStructure& s, const Point& p);
/// max over α of |d(θ_α - J_β θ_{α,γ})|.
double lchkt_residual(const QKTStructure& s, const Point& p);

}  // namespace qkt
