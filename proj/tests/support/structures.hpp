#pragma once

// Small hand-built structures shared by the unit tests.

#include "qkt/conformal.hpp"

#include <cmath>

namespace fixture {

using namespace qkt;

inline double exp_x1(const Point& p) { return std::exp(p(0)); }
inline double quad(const Point& p) { return 1.0 + p(0) * p(0) + p(2) * p(2); }

inline Vector dln_exp_x1(const Point& p) { return Vector::Unit(p.size(), 0); }
inline Vector dln_quad(const Point& p) {
  Vector v = Vector::Zero(p.size());
  v(0) = 2 * p(0) / quad(p);
  v(2) = 2 * p(2) / quad(p);
  return v;
}

inline CoordinatePatch conformal_patch(int n, double (*f)(const Point&)) {
  return CoordinatePatch{n, Box::cube(4 * n, -0.5, 0.5),
                         [f, n](const Point& p) -> Matrix { return f(p) * Matrix::Identity(4 * n, 4 * n); }, 1};
}

inline QuaternionicHermitianData conformal_data(int n, double (*f)(const Point&)) {
  return {conformal_patch(n, f), build_standard_hypercomplex(n)};
}

inline QKTStructure flat4() {
  return build_qkt_dim4(CoordinatePatch{1, Box::cube(4, -0.5, 0.5),
                                        [](const Point&) -> Matrix { return Matrix::Identity(4, 4); }, 1},
                        build_standard_hypercomplex(1), FormField{1, [](const Point&) { return Tensor(4, 1); }},
                        FDScheme{});
}

/// Dimension 4 with metric f·δ and the given torsion 1-form.
inline QKTStructure dim4(double (*f)(const Point&), Tensor (*t)(const Point&)) {
  return build_qkt_dim4(conformal_patch(1, f), build_standard_hypercomplex(1), FormField{1, t}, FDScheme{});
}

inline double one(const Point&) { return 1.0; }

inline Tensor t_const(const Point&) {
  Tensor t(4, 1);
  t(0) = 0.7;
  return t;
}

inline Tensor t_sin(const Point& p) {
  Tensor t(4, 1);
  t(0) = std::sin(p(1));
  return t;
}

inline Tensor t_sin_x1(const Point& p) {
  Tensor t(4, 1);
  t(0) = std::sin(p(0));
  return t;
}

/// t = -d ln f for f = exp(x1); f·δ with this torsion is HKT.
inline Tensor t_hkt_exp(const Point&) {
  Tensor t(4, 1);
  t(0) = -1.0;
  return t;
}

}  // namespace fixture
