#pragma once

// Closed-form values used as independent references in the unit tests.

#include "qkt/tensor.hpp"

#include <cmath>
#include <functional>

namespace oracle {

using qkt::Matrix;
using qkt::Point;
using qkt::Tensor;
using qkt::Vector;

/// Christoffel symbols Γ(l,i,j) of f·δ given d ln f.
inline Tensor conformal_christoffel(const Vector& dlnf) {
  const int n = static_cast<int>(dlnf.size());
  Tensor g(n, {qkt::Variance::Contravariant, qkt::Variance::Covariant, qkt::Variance::Covariant});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        g(l, i, j) = 0.5 * ((l == j ? dlnf(i) : 0.0) + (l == i ? dlnf(j) : 0.0) - (i == j ? dlnf(l) : 0.0));
  return g;
}

/// Ricci tensor of e^{2u}δ in dimension m for u with zero Hessian:
/// Ric = (m-2)(du⊗du - |du|² δ).
inline Matrix conformal_ricci_linear(const Vector& du) {
  const int m = static_cast<int>(du.size());
  return (m - 2) * (du * du.transpose() - du.squaredNorm() * Matrix::Identity(m, m));
}

/// The four quaternion units acting on R^4 (columns are images of e_b).
inline std::array<Matrix, 3> quaternion_units() {
  Matrix i(4, 4), j(4, 4);
  i << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
  j << 0, 0, -1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, 0, 0;
  return {i, j, i * j};
}

/// Levi-Civita symbol of a permutation of 0..3; 0 on repeated indices.
inline double levi_civita4(int a, int b, int c, int d) {
  const int v[4] = {a, b, c, d};
  for (int x = 0; x < 4; ++x)
    for (int y = x + 1; y < 4; ++y)
      if (v[x] == v[y]) return 0.0;
  int inversions = 0;
  for (int x = 0; x < 4; ++x)
    for (int y = x + 1; y < 4; ++y)
      if (v[x] > v[y]) ++inversions;
  return inversions % 2 ? -1.0 : 1.0;
}

/// Deterministic pseudo-random point in [-r, r]^n (linear congruential, test-only).
inline Point sample_point(int n, unsigned seed, double r = 0.4) {
  Point p(n);
  unsigned long long s = 6364136223846793005ULL * (seed + 1) + 1442695040888963407ULL;
  for (int i = 0; i < n; ++i) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    p(i) = r * (2.0 * static_cast<double>((s >> 11) & ((1ULL << 53) - 1)) / static_cast<double>(1ULL << 53) - 1.0);
  }
  return p;
}

}  // namespace oracle
