#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace specclip {

using Vector = std::vector<double>;

/// Dense real matrix, row-major. Sized constructors require positive
/// dimensions; a default-constructed Matrix is the empty 0x0 value.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, double fill);
  /// Throws ShapeMismatch if data.size() != rows*cols, NonFinite on NaN/Inf.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix diagonal(std::span<const double> diag, std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t min_dim() const noexcept { return rows_ < cols_ ? rows_ : cols_; }
  std::size_t max_dim() const noexcept { return rows_ < cols_ ? cols_ : rows_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  Vector column(std::size_t j) const;

  Matrix transpose() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a b^T without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_t(const Matrix& a, std::span<const double> x);
Matrix outer(std::span<const double> u, std::span<const double> v);

/// Frobenius inner product sum_ij A_ij B_ij.
double inner(const Matrix& a, const Matrix& b);
/// u^T A v.
double bilinear(std::span<const double> u, const Matrix& a, std::span<const double> v);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// Scales x to unit length in place; returns the original norm.
double normalize(std::span<double> x);

}  // namespace specclip
