#include "coercive/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coercive::numkit {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols) {
    throw ShapeError("DenseMatrix: entry count does not match shape");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::frobenius_norm() const { return norm2(entries_); }

double DenseMatrix::max_asymmetry() const {
  if (!is_square()) throw ShapeError("max_asymmetry: matrix is not square");
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw ShapeError("matrix addition: shape mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k)
    entries_[k] += other.entries_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw ShapeError("matrix subtraction: shape mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k)
    entries_[k] -= other.entries_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : entries_) v *= s;
  return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matrix product: inner dims");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ShapeError("matrix-vector: inner dims");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

void add_scaled_outer(DenseMatrix& a, double scale, std::span<const double> z) {
  if (a.rows() != z.size() || a.cols() != z.size())
    throw ShapeError("add_scaled_outer: shape mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double si = scale * z[i];
    for (std::size_t j = 0; j < z.size(); ++j) a(i, j) += si * z[j];
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so huge or tiny entries do not overflow/underflow.
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : x) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("max_abs_diff: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void check_symmetric(const DenseMatrix& a, double tol) {
  if (!a.is_square()) throw DomainError("symmetric eigensolver: not square");
  if (!a.all_finite()) throw DomainError("symmetric eigensolver: non-finite entry");
  const double asym = a.max_asymmetry();
  const double allowed = tol * std::max(1.0, a.frobenius_norm());
  if (asym > allowed) {
    std::ostringstream msg;
    msg << "symmetric eigensolver: matrix asymmetry " << asym
        << " exceeds " << allowed;
    throw DomainError(msg.str());
  }
}

}  // namespace

SymmetricEigen sym_eigen(const DenseMatrix& input, double tol) {
  check_symmetric(input, tol);
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  // Symmetrise exactly so rotations act on a truly symmetric matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
  DenseMatrix v = DenseMatrix::identity(n);
  const double target = 1e-12 * a.frobenius_norm();
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > target;
       ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), DenseMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

EigenSpectrum sym_eigvals(const DenseMatrix& a, double tol) {
  return {sym_eigen(a, tol).values};
}

Vector singular_values(const DenseMatrix& input) {
  if (!input.all_finite()) throw DomainError("singular_values: non-finite entry");
  // One-sided Jacobi works on columns; make the matrix tall.
  const DenseMatrix a0 = input.rows() >= input.cols() ? input : input.transpose();
  const std::size_t m = a0.rows();
  const std::size_t n = a0.cols();
  // Column-major copy for cache-friendly column rotations.
  std::vector<Vector> col(n, Vector(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) col[j][i] = a0(i, j);

  constexpr double kEps = 1e-15;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(col[p], col[p]);
        const double beta = dot(col[q], col[q]);
        const double gamma = dot(col[p], col[q]);
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = col[p][i];
          const double xq = col[q][i];
          col[p][i] = c * xp - s * xq;
          col[q][i] = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
  }
  Vector sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm2(col[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double min_singular_value(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const Vector sv = singular_values(a);
  return sv.back();
}

double nonsingularity_threshold(const DenseMatrix& a) {
  return 1e-8 * (1.0 + a.frobenius_norm());
}

bool is_nonsingular(const DenseMatrix& a) {
  return min_singular_value(a) > nonsingularity_threshold(a);
}

double least_squares_residual(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw ShapeError("least_squares_residual: rows vs rhs");
  const std::size_t m = a.rows();
  std::vector<Vector> basis;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Vector q(m);
    for (std::size_t i = 0; i < m; ++i) q[i] = a(i, j);
    const double original = norm2(q);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& e : basis) {
        const double c = dot(e, q);
        for (std::size_t i = 0; i < m; ++i) q[i] -= c * e[i];
      }
    const double nq = norm2(q);
    if (nq == 0.0 || nq <= 1e-12 * original) continue;
    for (double& x : q) x /= nq;
    basis.push_back(std::move(q));
  }
  Vector r(b.begin(), b.end());
  for (int pass = 0; pass < 2; ++pass)
    for (const Vector& e : basis) {
      const double c = dot(e, r);
      for (std::size_t i = 0; i < m; ++i) r[i] -= c * e[i];
    }
  return norm2(r);
}

Vector conv_padded(std::span<const double> alpha, std::span<const double> beta) {
  if (alpha.empty() || beta.empty())
    throw ShapeError("conv_padded: empty operand");
  const std::size_t da = alpha.size();
  const std::size_t db = beta.size();
  Vector out(da + db - 1, 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < da; ++i) {
      // Padded index i + j maps to beta index i + j - (da - 1).
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(i + j) -
                               static_cast<std::ptrdiff_t>(da - 1);
      if (t >= 0 && t < static_cast<std::ptrdiff_t>(db)) s += alpha[i] * beta[t];
    }
    out[j] = s;
  }
  return out;
}

DenseMatrix conv_matrix(std::span<const double> v, std::size_t dz) {
  if (v.empty() || dz == 0) throw ShapeError("conv_matrix: empty operand");
  const std::size_t s = v.size();
  DenseMatrix m(s + dz - 1, dz);
  for (std::size_t j = 0; j < m.rows(); ++j)
    for (std::size_t t = 0; t < dz; ++t) {
      const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(t + s - 1) -
                               static_cast<std::ptrdiff_t>(j);
      if (i >= 0 && i < static_cast<std::ptrdiff_t>(s)) m(j, t) = v[i];
    }
  return m;
}

}  // namespace coercive::numkit
