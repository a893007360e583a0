#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mvcp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Factor matrices are plain column-major Eigen matrices, one column per
/// component.
using FactorMatrix = Eigen::MatrixXd;

struct Dims {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  std::size_t size() const { return i * j * k; }
  std::size_t operator[](int mode) const;  // mode in {1,2,3}
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Dense third-order tensor of doubles.
///
/// Layout: entry (i, j, k) lives at offset i + I*(j + J*k). Mode-1 fibers are
/// contiguous and frontal slices are stored one after another in k order, so
/// slice k is a column-major I x J matrix.
class DenseTensor3 {
 public:
  DenseTensor3() = default;
  DenseTensor3(Dims dims, double fill = 0.0);
  /// Throws DimensionError on a count mismatch and InvalidArgument on a
  /// non-finite value.
  DenseTensor3(Dims dims, std::vector<double> values);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return values_.size(); }

  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims_.i * (j + dims_.j * k);
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return values_[offset(i, j, k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[offset(i, j, k)];
  }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Eigen::Map<const Matrix> slice(std::size_t k) const;
  Eigen::Map<Matrix> slice(std::size_t k);

  double frobenius_norm_sq() const;
  double max_abs() const;
  bool all_finite() const;

  friend bool operator==(const DenseTensor3&, const DenseTensor3&) = default;

 private:
  Dims dims_{};
  std::vector<double> values_;
};

/// Observed/held-out flags for a tensor (true = observed), same layout as
/// DenseTensor3.
class MaskTensor {
 public:
  MaskTensor() = default;
  explicit MaskTensor(Dims dims, bool observed = true);

  const Dims& dims() const { return dims_; }

  bool observed(std::size_t i, std::size_t j, std::size_t k) const {
    return flags_[i + dims_.i * (j + dims_.j * k)] != 0;
  }
  bool observed_at(std::size_t offset) const { return flags_[offset] != 0; }
  void set(std::size_t i, std::size_t j, std::size_t k, bool observed) {
    flags_[i + dims_.i * (j + dims_.j * k)] = observed ? 1 : 0;
  }

  std::size_t count_observed() const;
  std::size_t count_hidden() const { return flags_.size() - count_observed(); }

  /// flag(i,j,k) == flag(j,i,k) everywhere (requires I == J).
  bool symmetric_in_first_two_modes() const;

  /// Flags with observed and hidden swapped.
  MaskTensor complement() const;

  friend bool operator==(const MaskTensor&, const MaskTensor&) = default;

 private:
  Dims dims_{};
  std::vector<std::uint8_t> flags_;
};

/// Mode-n matricization, mode in {1,2,3}.
///
/// Column ordering (shared by every consumer in this library):
///   mode 1: I x (J*K), entry (i, j + J*k)
///   mode 2: J x (I*K), entry (j, i + I*k)
///   mode 3: K x (I*J), entry (k, i + I*j)
/// With this ordering a CP model satisfies
///   unfold(X,1) = A * khatri_rao(C, B)^T
///   unfold(X,2) = B * khatri_rao(C, A)^T
///   unfold(X,3) = C * khatri_rao(B, A)^T
Matrix unfold(const DenseTensor3& t, int mode);

/// Inverse of unfold for a tensor of the given dims.
DenseTensor3 refold(const Matrix& m, int mode, Dims dims);

/// Column-wise Kronecker product; row index of the result is ia * rows(b) + ib.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// n-mode product t x_mode m, where m has dims[mode] columns.
DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& m, int mode);

/// Symmetric CP reconstruction: entry (i,j,p) = sum_r lambda_r a(p,r) u(i,r) u(j,r).
/// The result has dims (N, N, P) with u on modes 1-2 and a on mode 3.
DenseTensor3 cp_reconstruct(const Vector& lambda, const Matrix& a, const Matrix& u);

/// Sum of squared differences over all entries.
double masked_sse(const DenseTensor3& t, const DenseTensor3& approx);
/// Sum of squared differences over entries flagged true in `mask`.
double masked_sse(const DenseTensor3& t, const DenseTensor3& approx, const MaskTensor& mask);

}  // namespace mvcp
