#pragma once

#include "qkt/conformal.hpp"
#include "qkt/expression.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace qkt {

enum class ManifoldKind { Flat, ConformalFlat, Dim4Torsion, HopfLocal };

std::string to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(const std::string& text);

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Flat;
  int n = 1;
  /// Conformal factor (conformal_flat; optional metric factor for dim4_torsion).
  std::optional<std::string> f;
  /// Components of the torsion 1-form in dimension 4.
  std::optional<std::array<std::string, 4>> t;
  std::optional<Box> domain;
  std::uint64_t seed = 42;
  int points = 20;
  FDScheme scheme;
  std::map<std::string, double> tolerance_overrides;
  /// Factor used by the conformal suite on kinds that are not themselves rescalings.
  std::optional<std::string> probe_f;
  /// Rotates J2 by this angle in the (x1,x2) coordinate plane, breaking the
  /// quaternionic compatibility. 0 leaves the structure intact.
  double perturb_j2_degrees = 0.0;

  int dim() const { return 4 * n; }
  Box effective_domain() const;
  void validate() const;
};

struct BuiltManifold {
  ManifoldSpec spec;
  QKTStructure structure;
  /// For rescaled kinds, the structure before rescaling and the factor.
  std::optional<QKTStructure> conformal_base;
  std::optional<ConformalFactor> factor;
  std::string factor_text;
  std::vector<Point> points;
};

/// Halton points (bases 2,3,5,..) with index offset `seed`, scaled into the box
/// shrunk by `margin` on every side.
std::vector<Point> halton_points(const Box& box, int count, std::uint64_t seed, double margin);
double sample_margin(const FDScheme& scheme);

/// Parses an expression and checks that it only uses x1..x_dim.
Expression parse_field_expression(const std::string& text, int dim);

HypercomplexField perturbed_hypercomplex(int n, double degrees);

/// Throws ParseError, DomainError, DimensionError, or NotQKTError.
BuiltManifold build_manifold(const ManifoldSpec& spec);

}  // namespace qkt
