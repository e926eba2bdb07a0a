#include "helpers.hpp"
#include "s3a/matrix.hpp"

using namespace s3a;
using s3a::test::random_matrix;

namespace {

// Entrywise oracles written independently of the library loops.
double l21_oracle(const Matrix& m) {
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sq = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) sq += m(r, c) * m(r, c);
    total += std::sqrt(sq);
  }
  return total;
}

double frob_oracle(const Matrix& m) {
  double total = 0.0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) total += m(r, c) * m(r, c);
  }
  return total;
}

}  // namespace

TEST_SUITE("numerics") {
TEST_CASE("sigmoid values") {
  const Matrix m = Matrix::from_rows({{0.0, 2.0, -2.0, 40.0, -40.0}});
  const Matrix s = sigmoid(m);
  CHECK(s(0, 0) == 0.5);
  // 1/(1+e^-2) to 17 significant digits
  CHECK(std::abs(s(0, 1) - 0.88079707797788244) < 1e-15);
  CHECK(std::abs(s(0, 1) + s(0, 2) - 1.0) < 1e-15);
  CHECK(std::abs(s(0, 3) + s(0, 4) - 1.0) < 1e-15);
  const Matrix values = sigmoid(random_matrix(6, 6, 3, 10.0));
  for (double v : values.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("sigmoid derivative") {
  const Matrix d = sigmoid_derivative(Matrix::from_rows({{0.0, 2.0, -2.0}}));
  CHECK(d(0, 0) == 0.25);
  CHECK(std::abs(d(0, 1) - 0.10499358540350652) < 1e-15);
  CHECK(std::abs(d(0, 1) - d(0, 2)) < 1e-15);
  const double h = 1e-5;
  for (int k = 0; k <= 100; ++k) {
    const double x = -5.0 + 0.1 * k;
    const double fd = (sigmoid(x + h) - sigmoid(x - h)) / (2 * h);
    const double an = sigmoid_derivative(Matrix::from_rows({{x}}))(0, 0);
    CHECK(std::abs(fd - an) < 1e-6);
    CHECK(an > 0.0);
    CHECK(an <= 0.25);
  }
}

TEST_CASE("frobenius_sq") {
  CHECK(frobenius_sq(Matrix(3, 2)) == 0.0);
  CHECK(frobenius_sq(Matrix::from_rows({{3.0, 4.0}})) == 25.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = random_matrix(5, 7, seed);
    CHECK(std::abs(frobenius_sq(m) - frob_oracle(m)) < 1e-12);
    // Single-column blocks: l21 of each column treated as a row equals its norm.
    double by_columns = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double n = l21_norm(transpose(Matrix::column(m.col(c))));
      by_columns += n * n;
    }
    CHECK(std::abs(frobenius_sq(m) - by_columns) < 1e-12);
  }
}

TEST_CASE("l21_norm examples and oracle") {
  CHECK(l21_norm(Matrix::from_rows({{3.0, 4.0}, {0.0, 0.0}})) == 5.0);
  CHECK(l21_norm(Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}})) == 2.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = random_matrix(5, 7, seed);
    CHECK(std::abs(l21_norm(m) - l21_oracle(m)) < 1e-12);
  }
}

TEST_CASE("l21_norm properties") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix a = random_matrix(4, 6, seed);
    const Matrix b = random_matrix(4, 6, seed + 1000);
    const double alpha = -2.5 + 0.1 * static_cast<double>(seed);
    CHECK(s3a::test::rel_close(l21_norm(alpha * a), std::abs(alpha) * l21_norm(a)) < 1e-12);
    CHECK(l21_norm(a + b) <= l21_norm(a) + l21_norm(b) + 1e-12);
    const double f = std::sqrt(frobenius_sq(a));
    CHECK(f <= l21_norm(a) + 1e-12);
    CHECK(l21_norm(a) <= std::sqrt(4.0) * f + 1e-12);
  }
}

TEST_CASE("matrix products against naive loops") {
  const Matrix a = random_matrix(3, 4, 1);
  const Matrix b = random_matrix(4, 5, 2);
  const Matrix c = matmul(a, b);
  const Matrix bt = transpose(b);
  const Matrix at = transpose(a);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      CHECK(std::abs(c(i, j) - s) < 1e-12);
    }
  }
  CHECK(matmul_bt(a, bt) == matmul_bt(a, bt));
  const Matrix c2 = matmul_bt(a, bt);
  const Matrix c3 = matmul_at(at, b);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::abs(c.data()[i] - c2.data()[i]) < 1e-12);
    CHECK(std::abs(c.data()[i] - c3.data()[i]) < 1e-12);
  }
  CHECK_ERRC(matmul(a, a), Errc::ShapeError);
}

TEST_CASE("matrix construction") {
  CHECK_ERRC(Matrix(2, 2, std::vector<double>{1.0}), Errc::ShapeError);
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6.0);
  CHECK(m.col(1) == Vector{2.0, 5.0});
  CHECK(all_finite(m));
  Matrix bad = m;
  bad(0, 0) = std::nan("");
  CHECK_FALSE(all_finite(bad));
}
}
