#pragma once

#include "qkt/errors.hpp"
#include "qkt/tensor.hpp"

#include <functional>

namespace qkt {

/// Axis-aligned open box.
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const;
  /// True when every coordinate of p is at least `margin` away from the faces.
  bool contains(const Point& p, double margin = 0.0) const;
  double distance_to_boundary(const Point& p) const;
  static Box cube(int dim, double lo, double hi);
};

/// Central differences of order 2. `h` is used for first-level derivatives,
/// `h2` whenever a derivative is taken of something that is itself built from
/// derivatives (curvature, derivatives of Lee forms, of the torsion, ...).
struct FDScheme {
  double h = 1e-4;
  double h2 = 1e-3;
  int order = 2;

  void validate() const;
};

using ScalarField = std::function<double(const Point&)>;
using MatrixField = std::function<Matrix(const Point&)>;
using TensorField = std::function<Tensor(const Point&)>;
/// Γ(l, i, j) with ∇_{∂i}∂j = Γ^l_{ij} ∂l.
using ConnectionField = TensorField;

struct FormField {
  int degree = 0;
  TensorField eval;

  Tensor operator()(const Point& p) const { return eval(p); }
};

struct CoordinatePatch {
  int n = 1;
  Box domain;
  MatrixField metric;
  int orientation = 1;

  int dim() const { return 4 * n; }
  /// Metric at p after the symmetry and positivity checks.
  Matrix metric_at(const Point& p) const;
  void validate() const;
};

/// Throws LinearAlgebraError unless g is symmetric within 1e-12 and its
/// smallest eigenvalue is at least 1e-8.
void check_metric(const Matrix& g);
Matrix inverse_metric(const Matrix& g);

TensorField as_tensor_field(const MatrixField& m);

Tensor partial_derivative(const TensorField& field, int direction, const Point& p, double h,
                          const Box& domain);
double partial_derivative(const ScalarField& field, int direction, const Point& p, double h,
                          const Box& domain);
/// Derivative index first: out(i, ...) = ∂_i field(...).
Tensor gradient(const TensorField& field, const Point& p, double h, const Box& domain);
Vector gradient(const ScalarField& field, const Point& p, double h, const Box& domain);

/// Antisymmetrized derivative from a gradient array (derivative index first).
Tensor exterior_derivative_of_gradient(const Tensor& grad);
Tensor exterior_derivative_at(const FormField& w, const Point& p, double h, const Box& domain);
FormField exterior_derivative(const FormField& w, double h, const Box& domain);

/// Shuffle sum without prefactor: (a∧b)(X,Y,Z) = a(X)b(Y,Z) + a(Y)b(Z,X) + a(Z)b(X,Y).
/// A rank-0 tensor acts as a scalar.
Tensor wedge(const Tensor& a, const Tensor& b);
FormField wedge(const FormField& a, const FormField& b);

/// Antisymmetry defect max |w(..i..j..) + w(..j..i..)| over adjacent slot pairs.
double antisymmetry_residual(const Tensor& w);

/// Raises every slot of a covariant tensor with g^{-1}.
Tensor raise_all(const Tensor& w, const Matrix& ginv);

Tensor hodge_star_4d(const Tensor& w, const Matrix& g, int orientation);

/// Columns are the Gram-Schmidt orthonormalization of the coordinate basis.
Matrix orthonormal_frame(const Matrix& g);

Tensor christoffel_from_metric_gradient(const Matrix& ginv, const Tensor& dg);
Tensor levi_civita(const CoordinatePatch& patch, const Point& p, double h);
ConnectionField levi_civita_field(const CoordinatePatch& patch, double h);

/// ∇A from the value, the coordinate gradient and Γ at one point. Slots are
/// corrected according to the signature of `value`.
Tensor covariant_derivative_from(const Tensor& gamma, const Tensor& value, const Tensor& grad);
Tensor covariant_derivative(const Tensor& gamma, const TensorField& field, const Point& p, double h,
                            const Box& domain);

/// Σ_ab m(a,b) t(a,b,...).
Tensor contract_first_two(const Tensor& t, const Matrix& m);
/// Σ_ab t(...,a,b) m(a,b).
Tensor contract_last_two(const Tensor& t, const Matrix& m);

/// δω = -Σ_i ι_{e_i} ∇^g_{e_i} ω over an orthonormal frame.
Tensor codifferential_at(const FormField& w, const CoordinatePatch& patch, const Point& p, double h);
FormField codifferential(const FormField& w, const CoordinatePatch& patch, double h);

}  // namespace qkt
