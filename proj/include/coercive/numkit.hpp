#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "coercive/error.hpp"

// Small dense linear algebra kernel: just enough for certificate matrices,
// eigenvalue perturbation checks and the padded 1-D convolution.
namespace coercive::numkit {

using Vector = std::vector<double>;

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const { return entries_; }

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  // max_{i,j} |a_ij - a_ji|; requires a square matrix.
  double max_asymmetry() const;
  bool all_finite() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    return a += b;
  }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    return a -= b;
  }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

// a += scale * z z^T
void add_scaled_outer(DenseMatrix& a, double scale, std::span<const double> z);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double max_abs_diff(std::span<const double> x, std::span<const double> y);

// Eigenvalues in non-decreasing order.
struct EigenSpectrum {
  Vector values;
};

struct SymmetricEigen {
  Vector values;         // ascending
  DenseMatrix vectors;   // column k pairs with values[k]
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// 1e-12 * ||A||_F. Throws DomainError when A is not square or when
// max|a_ij - a_ji| exceeds tol * max(1, ||A||_F).
SymmetricEigen sym_eigen(const DenseMatrix& a, double tol = 1e-10);
EigenSpectrum sym_eigvals(const DenseMatrix& a, double tol = 1e-10);

// Singular values (descending) by one-sided Jacobi; any shape.
Vector singular_values(const DenseMatrix& a);
// Smallest singular value. For rows < cols this is the smallest of the
// min(rows, cols) values, i.e. it does not count the trivial kernel.
double min_singular_value(const DenseMatrix& a);
// sigma_min(A) > 1e-8 * (1 + ||A||_F)
bool is_nonsingular(const DenseMatrix& a);
double nonsingularity_threshold(const DenseMatrix& a);

// Distance from b to the column space of a (Gram-Schmidt with one
// re-orthogonalisation pass; rank-deficient columns are skipped).
double least_squares_residual(const DenseMatrix& a, std::span<const double> b);

// alpha * beta with zero padding of alpha.size()-1 on both sides of beta:
//   out(j) = sum_i alpha(i) * pad(beta)(i + j),  |out| = |alpha| + |beta| - 1
Vector conv_padded(std::span<const double> alpha, std::span<const double> beta);

// The (|v| + dz - 1) x dz banded matrix V with conv_padded(v, z) == V z.
DenseMatrix conv_matrix(std::span<const double> v, std::size_t dz);

}  // namespace coercive::numkit
