#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace s3a {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Columns are samples, rows are
/// features or hidden units.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  Vector col(std::size_t c) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Elementwise activations.
Matrix sigmoid(const Matrix& m);
Matrix sigmoid_derivative(const Matrix& m);
double sigmoid(double x) noexcept;

// Norms. l21_norm sums the Euclidean norms of the rows.
double frobenius_sq(const Matrix& m) noexcept;
double l21_norm(const Matrix& m) noexcept;
Vector row_norms(const Matrix& m);

// Products. All reductions accumulate in ascending index order.
Matrix matmul(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_bt(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix& axpy(double alpha, const Matrix& x, Matrix& y);

double dot(std::span<const double> a, std::span<const double> b);
bool all_finite(const Matrix& m) noexcept;

}  // namespace s3a
