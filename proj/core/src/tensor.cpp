#include "mvcp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mvcp/error.hpp"

namespace mvcp {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw InvalidArgument("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

std::string dims_string(const Dims& d) {
  return "(" + std::to_string(d.i) + "," + std::to_string(d.j) + "," + std::to_string(d.k) + ")";
}

}  // namespace

std::size_t Dims::operator[](int mode) const {
  check_mode(mode);
  return mode == 1 ? i : mode == 2 ? j : k;
}

DenseTensor3::DenseTensor3(Dims dims, double fill) : dims_(dims), values_(dims.size(), fill) {
  if (!std::isfinite(fill)) throw InvalidArgument("tensor fill value must be finite");
}

DenseTensor3::DenseTensor3(Dims dims, std::vector<double> values)
    : dims_(dims), values_(std::move(values)) {
  if (values_.size() != dims_.size()) {
    throw DimensionError("tensor dims " + dims_string(dims_) + " need " +
                         std::to_string(dims_.size()) + " values, got " +
                         std::to_string(values_.size()));
  }
  if (!all_finite()) throw InvalidArgument("tensor values must be finite");
}

Eigen::Map<const Matrix> DenseTensor3::slice(std::size_t k) const {
  const auto n = static_cast<Eigen::Index>(dims_.i * dims_.j);
  return Eigen::Map<const Matrix>(values_.data() + n * static_cast<Eigen::Index>(k),
                                  static_cast<Eigen::Index>(dims_.i),
                                  static_cast<Eigen::Index>(dims_.j));
}

Eigen::Map<Matrix> DenseTensor3::slice(std::size_t k) {
  const auto n = static_cast<Eigen::Index>(dims_.i * dims_.j);
  return Eigen::Map<Matrix>(values_.data() + n * static_cast<Eigen::Index>(k),
                            static_cast<Eigen::Index>(dims_.i),
                            static_cast<Eigen::Index>(dims_.j));
}

double DenseTensor3::frobenius_norm_sq() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

double DenseTensor3::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool DenseTensor3::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

MaskTensor::MaskTensor(Dims dims, bool observed)
    : dims_(dims), flags_(dims.size(), observed ? 1 : 0) {}

std::size_t MaskTensor::count_observed() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

bool MaskTensor::symmetric_in_first_two_modes() const {
  if (dims_.i != dims_.j) return false;
  for (std::size_t k = 0; k < dims_.k; ++k)
    for (std::size_t j = 0; j < dims_.j; ++j)
      for (std::size_t i = j + 1; i < dims_.i; ++i)
        if (observed(i, j, k) != observed(j, i, k)) return false;
  return true;
}

MaskTensor MaskTensor::complement() const {
  MaskTensor out = *this;
  for (auto& f : out.flags_) f = f ? 0 : 1;
  return out;
}

Matrix unfold(const DenseTensor3& t, int mode) {
  check_mode(mode);
  const auto [I, J, K] = t.dims();
  Matrix m;
  switch (mode) {
    case 1:
      m.resize(I, J * K);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i) m(i, j + J * k) = t(i, j, k);
      break;
    case 2:
      m.resize(J, I * K);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i) m(j, i + I * k) = t(i, j, k);
      break;
    default:
      m.resize(K, I * J);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i) m(k, i + I * j) = t(i, j, k);
      break;
  }
  return m;
}

DenseTensor3 refold(const Matrix& m, int mode, Dims dims) {
  check_mode(mode);
  const auto [I, J, K] = dims;
  const std::size_t rows = dims[mode];
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.cols()) * rows != dims.size()) {
    throw DimensionError("cannot refold a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix into dims " + dims_string(dims));
  }
  DenseTensor3 t(dims);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t i = 0; i < I; ++i) {
        switch (mode) {
          case 1: t(i, j, k) = m(i, j + J * k); break;
          case 2: t(i, j, k) = m(j, i + I * k); break;
          default: t(i, j, k) = m(k, i + I * j); break;
        }
      }
  return t;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("khatri_rao: column counts differ (" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.cols()) + ")");
  }
  Matrix out(a.rows() * b.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.cols(); ++r)
    for (Eigen::Index ia = 0; ia < a.rows(); ++ia)
      out.col(r).segment(ia * b.rows(), b.rows()) = a(ia, r) * b.col(r);
  return out;
}

DenseTensor3 mode_product(const DenseTensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  if (static_cast<std::size_t>(m.cols()) != t.dims()[mode]) {
    throw DimensionError("mode_product: matrix has " + std::to_string(m.cols()) +
                         " columns but mode " + std::to_string(mode) + " has size " +
                         std::to_string(t.dims()[mode]));
  }
  Dims out = t.dims();
  const auto rows = static_cast<std::size_t>(m.rows());
  if (mode == 1) out.i = rows;
  else if (mode == 2) out.j = rows;
  else out.k = rows;
  return refold(m * unfold(t, mode), mode, out);
}

DenseTensor3 cp_reconstruct(const Vector& lambda, const Matrix& a, const Matrix& u) {
  const Eigen::Index R = lambda.size();
  if (a.cols() != R || u.cols() != R) {
    throw DimensionError("cp_reconstruct: rank mismatch (lambda " + std::to_string(R) +
                         ", phase loadings " + std::to_string(a.cols()) +
                         ", video loadings " + std::to_string(u.cols()) + ")");
  }
  const auto N = static_cast<std::size_t>(u.rows());
  const auto P = static_cast<std::size_t>(a.rows());
  DenseTensor3 t(Dims{N, N, P});
  Vector w(R);
  for (std::size_t p = 0; p < P; ++p) {
    for (Eigen::Index r = 0; r < R; ++r) w(r) = lambda(r) * a(static_cast<Eigen::Index>(p), r);
    // upper triangle then mirror, so (i,j,p) and (j,i,p) are the same double
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t i = 0; i <= j; ++i) {
        double s = 0.0;
        for (Eigen::Index r = 0; r < R; ++r) {
          s += w(r) * (u(static_cast<Eigen::Index>(i), r) * u(static_cast<Eigen::Index>(j), r));
        }
        t(i, j, p) = s;
        t(j, i, p) = s;
      }
  }
  return t;
}

double masked_sse(const DenseTensor3& t, const DenseTensor3& approx) {
  if (t.dims() != approx.dims()) {
    throw DimensionError("masked_sse: dims " + dims_string(t.dims()) + " vs " +
                         dims_string(approx.dims()));
  }
  const auto x = t.values();
  const auto y = approx.values();
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double d = x[n] - y[n];
    s += d * d;
  }
  return s;
}

double masked_sse(const DenseTensor3& t, const DenseTensor3& approx, const MaskTensor& mask) {
  if (t.dims() != approx.dims() || t.dims() != mask.dims()) {
    throw DimensionError("masked_sse: dims " + dims_string(t.dims()) + ", " +
                         dims_string(approx.dims()) + " and mask " + dims_string(mask.dims()) +
                         " must agree");
  }
  const auto x = t.values();
  const auto y = approx.values();
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (!mask.observed_at(n)) continue;
    const double d = x[n] - y[n];
    s += d * d;
  }
  return s;
}

}  // namespace mvcp
