#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qkt {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Variance { Covariant, Contravariant };

/// Dense multi-index array with extent `dim` in every slot.
///
/// Storage is row-major: the last index varies fastest. The signature records
/// the variance of each slot; it is only consulted by covariant
/// differentiation and defaults to all-covariant.
class Tensor {
public:
  Tensor() = default;
  Tensor(int dim, int rank);
  Tensor(int dim, std::vector<Variance> signature);

  static Tensor from_vector(const Vector& v);
  static Tensor from_matrix(const Matrix& m);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(signature_.size()); }
  std::size_t size() const { return data_.size(); }
  const std::vector<Variance>& signature() const { return signature_; }
  void set_signature(std::vector<Variance> signature);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  template <class... I>
  double& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  double operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  double& at(std::span<const int> idx) { return data_[offset_of(idx)]; }
  double at(std::span<const int> idx) const { return data_[offset_of(idx)]; }

  Vector to_vector() const;
  Matrix to_matrix() const;

  Tensor& operator+=(const Tensor& o);
  Tensor& operator-=(const Tensor& o);
  Tensor& operator*=(double s);

  /// Largest absolute entry; 0 for an empty tensor.
  double max_abs() const;
  bool all_finite() const;

  /// Returns a copy with slot `from` moved to position `to`.
  Tensor move_slot(int from, int to) const;
  /// Slot k of the result is slot perm[k] of this tensor (numpy transpose).
  Tensor permuted(std::span<const int> perm) const;

private:
  template <class... I>
  std::size_t offset(I... idx) const {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }
  std::size_t offset_of(std::span<const int> idx) const;

  int dim_ = 0;
  std::vector<Variance> signature_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

/// max |a - b| over all entries; shapes must agree.
double max_abs_diff(const Tensor& a, const Tensor& b);

/// Calls fn(idx) for every multi-index of a rank-`rank` array of extent `dim`.
void for_each_index(int dim, int rank, const std::function<void(std::span<const int>)>& fn);

/// Contracts slots of `t` with the matrix `m`: every listed slot s is replaced
/// by sum_a t(..a..) m(a, i). For a covariant slot and m = J this evaluates the
/// form on J X instead of X.
Tensor apply_to_slots(const Tensor& t, const Matrix& m, std::span<const int> slots);

/// Sign of a permutation of 0..k-1 given as a sequence.
int permutation_sign(std::span<const int> perm);

}  // namespace qkt
