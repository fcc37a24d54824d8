#include "qkt/tensor_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qkt {

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= upper(i) - lower(i);
  return v;
}

bool Box::contains(const Point& p, double margin) const {
  if (p.size() != lower.size()) return false;
  for (int i = 0; i < dim(); ++i)
    if (!(p(i) - margin > lower(i) && p(i) + margin < upper(i))) return false;
  return true;
}

double Box::distance_to_boundary(const Point& p) const {
  double d = INFINITY;
  for (int i = 0; i < dim(); ++i) d = std::min({d, p(i) - lower(i), upper(i) - p(i)});
  return d;
}

Box Box::cube(int dim, double lo, double hi) {
  return Box{Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
}

void FDScheme::validate() const {
  if (!(h > 0.0) || !(h2 > 0.0)) throw DomainError("FD steps must be positive");
  if (order != 2) throw DomainError("only second-order central differences are supported");
}

void check_metric(const Matrix& g) {
  if (g.rows() != g.cols()) throw LinearAlgebraError("metric is not square");
  if (!g.allFinite()) throw LinearAlgebraError("metric has non-finite entries");
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw LinearAlgebraError("metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < 1e-8)
    throw LinearAlgebraError("metric is degenerate or indefinite (smallest eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
}

Matrix inverse_metric(const Matrix& g) {
  Eigen::LDLT<Matrix> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw LinearAlgebraError("metric is not invertible");
  return ldlt.solve(Matrix::Identity(g.rows(), g.cols()));
}

Matrix CoordinatePatch::metric_at(const Point& p) const {
  Matrix g = metric(p);
  if (g.rows() != dim()) throw DimensionError("metric size does not match 4n");
  check_metric(g);
  return g;
}

void CoordinatePatch::validate() const {
  if (n < 1) throw DimensionError("quaternionic dimension must be positive");
  if (domain.dim() != dim()) throw DimensionError("domain dimension does not match 4n");
  if (!(domain.upper.array() > domain.lower.array()).all())
    throw DomainError("domain box has no volume");
  if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
  if (!metric) throw DomainError("patch has no metric");
}

TensorField as_tensor_field(const MatrixField& m) {
  return [m](const Point& p) { return Tensor::from_matrix(m(p)); };
}

namespace {

void check_stencil(const Point& p, int direction, double h, const Box& domain) {
  if (direction < 0 || direction >= p.size()) throw std::out_of_range("bad derivative direction");
  if (!(h > 0.0)) throw DomainError("FD step must be positive");
  if (!(p(direction) - h > domain.lower(direction) && p(direction) + h < domain.upper(direction)))
    throw BoundaryError("finite-difference stencil leaves the domain along axis " +
                        std::to_string(direction + 1));
}

}  // namespace

Tensor partial_derivative(const TensorField& field, int direction, const Point& p, double h,
                          const Box& domain) {
  check_stencil(p, direction, h, domain);
  Point a = p;
  Point b = p;
  a(direction) += h;
  b(direction) -= h;
  Tensor out = field(a);
  out -= field(b);
  out *= 1.0 / (2.0 * h);
  return out;
}

double partial_derivative(const ScalarField& field, int direction, const Point& p, double h,
                          const Box& domain) {
  check_stencil(p, direction, h, domain);
  Point a = p;
  Point b = p;
  a(direction) += h;
  b(direction) -= h;
  return (field(a) - field(b)) / (2.0 * h);
}

Tensor gradient(const TensorField& field, const Point& p, double h, const Box& domain) {
  const int n = static_cast<int>(p.size());
  Tensor out;
  std::size_t block = 0;
  for (int i = 0; i < n; ++i) {
    Tensor di = partial_derivative(field, i, p, h, domain);
    if (i == 0) {
      std::vector<Variance> sig{Variance::Covariant};
      sig.insert(sig.end(), di.signature().begin(), di.signature().end());
      out = Tensor(n, sig);
      block = di.size();
    }
    std::copy(di.data().begin(), di.data().end(), out.data().begin() + static_cast<std::ptrdiff_t>(i * block));
  }
  return out;
}

Vector gradient(const ScalarField& field, const Point& p, double h, const Box& domain) {
  Vector out(p.size());
  for (int i = 0; i < p.size(); ++i) out(i) = partial_derivative(field, i, p, h, domain);
  return out;
}

Tensor exterior_derivative_of_gradient(const Tensor& grad) {
  const int r = grad.rank();
  Tensor out(grad.dim(), r);
  for (int j = 0; j < r; ++j) {
    Tensor term = grad.move_slot(0, j);
    if (j % 2) term *= -1.0;
    out += term;
  }
  return out;
}

Tensor exterior_derivative_at(const FormField& w, const Point& p, double h, const Box& domain) {
  if (w.degree >= p.size())
    throw DegreeOverflowError("exterior derivative of a top-degree form");
  return exterior_derivative_of_gradient(gradient(w.eval, p, h, domain));
}

FormField exterior_derivative(const FormField& w, double h, const Box& domain) {
  if (w.degree >= domain.dim()) throw DegreeOverflowError("exterior derivative of a top-degree form");
  return FormField{w.degree + 1, [w, h, domain](const Point& p) { return exterior_derivative_at(w, p, h, domain); }};
}

Tensor wedge(const Tensor& a, const Tensor& b) {
  const int p = a.rank();
  const int q = b.rank();
  if (p == 0) return a.data()[0] * b;
  if (q == 0) return b.data()[0] * a;
  if (a.dim() != b.dim()) throw DimensionError("wedge: dimension mismatch");
  const int n = a.dim();
  if (p + q > n) throw DegreeOverflowError("wedge: degree exceeds dimension");
  const int r = p + q;
  Tensor out(n, r);
  // Each p-subset S of slots receives a, the rest receives b, with the sign of
  // the shuffle (S, rest).
  std::vector<int> mask(static_cast<std::size_t>(r), 0);
  std::fill(mask.begin(), mask.begin() + p, 1);
  std::vector<int> perm(static_cast<std::size_t>(r));
  std::vector<int> ia(static_cast<std::size_t>(p));
  std::vector<int> ib(static_cast<std::size_t>(q));
  do {
    int k = 0;
    for (int s = 0; s < r; ++s)
      if (mask[static_cast<std::size_t>(s)]) perm[static_cast<std::size_t>(k++)] = s;
    for (int s = 0; s < r; ++s)
      if (!mask[static_cast<std::size_t>(s)]) perm[static_cast<std::size_t>(k++)] = s;
    const double sign = permutation_sign(perm);
    for_each_index(n, r, [&](std::span<const int> idx) {
      for (int s = 0; s < p; ++s) ia[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
      for (int s = 0; s < q; ++s) ib[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(p + s)])];
      out.at(idx) += sign * a.at(ia) * b.at(ib);
    });
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  return FormField{a.degree + b.degree, [a, b](const Point& p) { return wedge(a(p), b(p)); }};
}

double antisymmetry_residual(const Tensor& w) {
  double m = 0.0;
  const int r = w.rank();
  for (int s = 0; s + 1 < r; ++s) {
    std::vector<int> perm(static_cast<std::size_t>(r));
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(s + 1)]);
    m = std::max(m, (w + w.permuted(perm)).max_abs());
  }
  return m;
}

Tensor raise_all(const Tensor& w, const Matrix& ginv) {
  std::vector<int> slots(static_cast<std::size_t>(w.rank()));
  std::iota(slots.begin(), slots.end(), 0);
  Tensor out = apply_to_slots(w, ginv, slots);
  out.set_signature(std::vector<Variance>(slots.size(), Variance::Contravariant));
  return out;
}

Tensor hodge_star_4d(const Tensor& w, const Matrix& g, int orientation) {
  if (w.dim() != 4 || g.rows() != 4) throw DimensionError("Hodge star is implemented in dimension 4 only");
  const int k = w.rank();
  const Tensor up = raise_all(w, inverse_metric(g));
  const double vol = orientation * std::sqrt(g.determinant());
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  Tensor out(4, 4 - k);
  std::array<int, 4> full{};
  for_each_index(4, 4, [&](std::span<const int> idx) {
    std::copy(idx.begin(), idx.end(), full.begin());
    std::array<int, 4> sorted = full;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
    const double eps = permutation_sign(full);
    out.at(idx.subspan(static_cast<std::size_t>(k))) += eps * up.at(idx.first(static_cast<std::size_t>(k)));
  });
  out *= vol / kfact;
  return out;
}

Matrix orthonormal_frame(const Matrix& g) {
  check_metric(g);
  const int n = static_cast<int>(g.rows());
  Matrix e = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    Vector v = Vector::Unit(n, i);
    for (int j = 0; j < i; ++j) v -= (e.col(j).dot(g * v)) * e.col(j);
    const double norm2 = v.dot(g * v);
    if (!(norm2 > 0.0)) throw LinearAlgebraError("Gram-Schmidt breakdown");
    e.col(i) = v / std::sqrt(norm2);
  }
  return e;
}

Tensor christoffel_from_metric_gradient(const Matrix& ginv, const Tensor& dg) {
  const int n = dg.dim();
  // c(i,j,m) = ∂_i g_jm + ∂_j g_im − ∂_m g_ij
  std::vector<double> c(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        c[static_cast<std::size_t>((i * n + j) * n + m)] = dg(i, j, m) + dg(j, i, m) - dg(m, i, j);
  Tensor gamma(n, {Variance::Contravariant, Variance::Covariant, Variance::Covariant});
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += ginv(l, m) * c[static_cast<std::size_t>((i * n + j) * n + m)];
        gamma(l, i, j) = 0.5 * s;
      }
  return gamma;
}

Tensor levi_civita(const CoordinatePatch& patch, const Point& p, double h) {
  const Matrix g = patch.metric_at(p);
  const Tensor dg = gradient(as_tensor_field(patch.metric), p, h, patch.domain);
  return christoffel_from_metric_gradient(inverse_metric(g), dg);
}

ConnectionField levi_civita_field(const CoordinatePatch& patch, double h) {
  return [patch, h](const Point& p) { return levi_civita(patch, p, h); };
}

Tensor covariant_derivative_from(const Tensor& gamma, const Tensor& value, const Tensor& grad) {
  const int n = value.dim();
  const int r = value.rank();
  Tensor out = grad;
  std::vector<int> src(static_cast<std::size_t>(r));
  for_each_index(n, r + 1, [&](std::span<const int> idx) {
    const int i = idx[0];
    double acc = 0.0;
    for (int s = 0; s < r; ++s) {
      std::copy(idx.begin() + 1, idx.end(), src.begin());
      const int slot_index = idx[static_cast<std::size_t>(s + 1)];
      for (int c = 0; c < n; ++c) {
        src[static_cast<std::size_t>(s)] = c;
        if (value.signature()[static_cast<std::size_t>(s)] == Variance::Contravariant)
          acc += gamma(slot_index, i, c) * value.at(src);
        else
          acc -= gamma(c, i, slot_index) * value.at(src);
      }
    }
    out.at(idx) += acc;
  });
  return out;
}

Tensor covariant_derivative(const Tensor& gamma, const TensorField& field, const Point& p, double h,
                            const Box& domain) {
  return covariant_derivative_from(gamma, field(p), gradient(field, p, h, domain));
}

Tensor contract_first_two(const Tensor& t, const Matrix& m) {
  const int n = t.dim();
  const int r = t.rank();
  if (r < 2) throw std::invalid_argument("contract_first_two: rank below 2");
  std::vector<Variance> sig(t.signature().begin() + 2, t.signature().end());
  Tensor out(n, sig);
  const std::size_t block = out.size();
  auto src = t.data();
  auto dst = out.data();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double w = m(a, b);
      if (w == 0.0) continue;
      const std::size_t base = static_cast<std::size_t>(a * n + b) * block;
      for (std::size_t k = 0; k < block; ++k) dst[k] += w * src[base + k];
    }
  return out;
}

Tensor contract_last_two(const Tensor& t, const Matrix& m) {
  const int n = t.dim();
  const int r = t.rank();
  if (r < 2) throw std::invalid_argument("contract_last_two: rank below 2");
  std::vector<Variance> sig(t.signature().begin(), t.signature().end() - 2);
  Tensor out(n, sig);
  auto src = t.data();
  auto dst = out.data();
  const std::size_t nn = static_cast<std::size_t>(n * n);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc += src[k * nn + static_cast<std::size_t>(a * n + b)] * m(a, b);
    dst[k] = acc;
  }
  return out;
}

Tensor codifferential_at(const FormField& w, const CoordinatePatch& patch, const Point& p, double h) {
  if (w.degree < 1) throw DegreeOverflowError("codifferential of a 0-form");
  const Matrix g = patch.metric_at(p);
  const Matrix e = orthonormal_frame(g);
  const Tensor gamma = levi_civita(patch, p, h);
  const Tensor nw = covariant_derivative(gamma, w.eval, p, h, patch.domain);
  Tensor out = contract_first_two(nw, e * e.transpose());
  out *= -1.0;
  return out;
}

FormField codifferential(const FormField& w, const CoordinatePatch& patch, double h) {
  if (w.degree < 1) throw DegreeOverflowError("codifferential of a 0-form");
  return FormField{w.degree - 1, [w, patch, h](const Point& p) { return codifferential_at(w, patch, p, h); }};
}

}  // namespace qkt
