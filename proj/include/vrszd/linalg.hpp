#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vrszd {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  Vector column(std::size_t c) const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double squared_norm(std::span<const double> x);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
Vector subtract(std::span<const double> x, std::span<const double> y);
bool all_finite(std::span<const double> x);

Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_transposed(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Householder thin QR of a rows x cols column-major block (rows >= cols).
// q is rows x cols column-major, r is cols x cols column-major upper triangular.
struct ColumnQr {
  std::vector<double> q;
  std::vector<double> r;
};
ColumnQr thin_qr_columns(std::span<const double> a, std::size_t rows, std::size_t cols);

struct ThinQr {
  Matrix q;  // d x l, orthonormal columns
  Matrix r;  // l x l, upper triangular
};
ThinQr thin_qr(const Matrix& m);

// m = u * diag(sigma) * v^T with sigma non-negative and non-increasing.
struct Svd {
  Matrix u;
  Vector sigma;
  Matrix v;
};
Svd svd(const Matrix& m);

}  // namespace vrszd
