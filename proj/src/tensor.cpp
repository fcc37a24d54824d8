#include "qkt/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qkt {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

Tensor::Tensor(int dim, int rank)
    : Tensor(dim, std::vector<Variance>(static_cast<std::size_t>(rank), Variance::Covariant)) {}

Tensor::Tensor(int dim, std::vector<Variance> signature)
    : dim_(dim), signature_(std::move(signature)), data_(ipow(dim, static_cast<int>(signature_.size())), 0.0) {
  if (dim <= 0) throw std::invalid_argument("Tensor: dimension must be positive");
}

Tensor Tensor::from_vector(const Vector& v) {
  Tensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) t(i) = v(i);
  return t;
}

Tensor Tensor::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("Tensor::from_matrix: matrix must be square");
  const int n = static_cast<int>(m.rows());
  Tensor t(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = m(i, j);
  return t;
}

void Tensor::set_signature(std::vector<Variance> signature) {
  if (signature.size() != signature_.size())
    throw std::invalid_argument("Tensor::set_signature: rank mismatch");
  signature_ = std::move(signature);
}

std::size_t Tensor::offset_of(std::span<const int> idx) const {
  std::size_t off = 0;
  for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  return off;
}

Vector Tensor::to_vector() const {
  if (rank() != 1) throw std::logic_error("Tensor::to_vector: rank is not 1");
  Vector v(dim_);
  for (int i = 0; i < dim_; ++i) v(i) = data_[static_cast<std::size_t>(i)];
  return v;
}

Matrix Tensor::to_matrix() const {
  if (rank() != 2) throw std::logic_error("Tensor::to_matrix: rank is not 2");
  Matrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

Tensor& Tensor::operator+=(const Tensor& o) {
  if (o.data_.size() != data_.size()) throw std::invalid_argument("Tensor: shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& o) {
  if (o.data_.size() != data_.size()) throw std::invalid_argument("Tensor: shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Tensor Tensor::move_slot(int from, int to) const {
  std::vector<int> order;
  for (int i = 0; i < rank(); ++i)
    if (i != from) order.push_back(i);
  order.insert(order.begin() + to, from);
  // order[k] is the source slot placed at position k.
  return permuted(order);
}

Tensor Tensor::permuted(std::span<const int> perm) const {
  const int r = rank();
  if (static_cast<int>(perm.size()) != r) throw std::invalid_argument("Tensor::permuted: rank mismatch");
  std::vector<Variance> sig(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) sig[static_cast<std::size_t>(k)] = signature_[static_cast<std::size_t>(perm[k])];
  Tensor out(dim_, sig);
  std::vector<int> src(static_cast<std::size_t>(r));
  for_each_index(dim_, r, [&](std::span<const int> idx) {
    for (int k = 0; k < r; ++k) src[static_cast<std::size_t>(perm[k])] = idx[static_cast<std::size_t>(k)];
    out.at(idx) = at(src);
  });
  return out;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

void for_each_index(int dim, int rank, const std::function<void(std::span<const int>)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(rank), 0);
  if (rank == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int k = rank - 1;
    while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == dim) {
      idx[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) return;
  }
}

Tensor apply_to_slots(const Tensor& t, const Matrix& m, std::span<const int> slots) {
  const int n = t.dim();
  const int r = t.rank();
  Tensor cur = t;
  for (int slot : slots) {
    if (slot < 0 || slot >= r) throw std::out_of_range("apply_to_slots: bad slot");
    Tensor next(n, cur.signature());
    // Stride of `slot` in row-major layout.
    std::size_t stride = 1;
    for (int k = slot + 1; k < r; ++k) stride *= static_cast<std::size_t>(n);
    const std::size_t block = stride * static_cast<std::size_t>(n);
    auto src = cur.data();
    auto dst = next.data();
    for (std::size_t base = 0; base < src.size(); base += block) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        for (int i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a)
            acc += src[base + static_cast<std::size_t>(a) * stride + inner] * m(a, i);
          dst[base + static_cast<std::size_t>(i) * stride + inner] = acc;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

int permutation_sign(std::span<const int> perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) sign = -sign;
  return sign;
}

}  // namespace qkt
