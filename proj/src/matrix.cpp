#include "specclip/matrix.hpp"

#include <cmath>
#include <string>

#include "specclip/error.hpp"
#include "specclip/kernels.hpp"

namespace specclip {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) fail(Errc::InvalidArgument, "matrix dimensions must be positive");
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  if (!std::isfinite(fill)) fail(Errc::NonFinite, "fill value is not finite");
  data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) {
    fail(Errc::ShapeMismatch, "expected " + std::to_string(rows * cols) + " entries, got " +
                                  std::to_string(data_.size()));
  }
  if (!all_finite()) fail(Errc::NonFinite, "matrix entries must be finite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  check_dims(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(Errc::ShapeMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) fail(Errc::NonFinite, "matrix entries must be finite");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  return diagonal(diag, diag.size(), diag.size());
}

Matrix Matrix::diagonal(std::span<const double> diag, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  const std::size_t k = std::min({diag.size(), rows, cols});
  for (std::size_t i = 0; i < k; ++i) m(i, i) = diag[i];
  if (!m.all_finite()) fail(Errc::NonFinite, "diagonal entries must be finite");
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  for (double x : data_)
    if (!std::isfinite(x)) return false;
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& x : data_) x *= s;
  return *this;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(Errc::ShapeMismatch, std::string(where) + ": " + std::to_string(a.rows()) + "x" +
                                  std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                  "x" + std::to_string(b.cols()));
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail(Errc::ShapeMismatch, "matmul inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  kernels::gemm(a.rows(), a.cols(), b.cols(), a.values().data(), b.values().data(),
                c.values().data());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) fail(Errc::ShapeMismatch, "matmul_tn row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto ar = a.row(k);
    auto br = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ar[i];
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aki * br[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) fail(Errc::ShapeMismatch, "matmul_nt column counts differ");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) fail(Errc::ShapeMismatch, "matvec length");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_t(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) fail(Errc::ShapeMismatch, "matvec_t length");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += x[i] * r[j];
  }
  return y;
}

Matrix outer(std::span<const double> u, std::span<const double> v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

double inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner");
  return dot(a.values(), b.values());
}

double bilinear(std::span<const double> u, const Matrix& a, std::span<const double> v) {
  if (u.size() != a.rows() || v.size() != a.cols()) fail(Errc::ShapeMismatch, "bilinear");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += u[i] * dot(a.row(i), v);
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(Errc::LengthMismatch, "dot");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double normalize(std::span<double> x) {
  const double nrm = norm2(x);
  if (nrm > 0.0)
    for (double& v : x) v /= nrm;
  return nrm;
}

}  // namespace specclip
