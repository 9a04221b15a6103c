#ifndef CONTESTNET_LINALG_HPP
#define CONTESTNET_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace contestnet {

// Row-major dense matrix, just big enough for the KKT systems we solve.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  double& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
  double operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

 private:
  size_t rows_, cols_;
  std::vector<double> a_;
};

// Solves A x = b in place via LU with partial pivoting. Returns false if the
// matrix is numerically singular.
inline bool solve_linear(Matrix a, std::vector<double> b, std::vector<double>& x) {
  const size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");
  std::vector<size_t> piv(n);
  for (size_t i = 0; i < n; i++) piv[i] = i;

  for (size_t col = 0; col < n; col++) {
    size_t best = col;
    double best_abs = std::fabs(a(col, col));
    for (size_t r = col + 1; r < n; r++) {
      double v = std::fabs(a(r, col));
      if (v > best_abs) { best_abs = v; best = r; }
    }
    if (!(best_abs > 1e-300)) return false;
    if (best != col) {
      for (size_t j = 0; j < n; j++) std::swap(a(col, j), a(best, j));
      std::swap(b[col], b[best]);
    }
    const double inv = 1.0 / a(col, col);
    for (size_t r = col + 1; r < n; r++) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      a(r, col) = 0.0;
      for (size_t j = col + 1; j < n; j++) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }

  x.assign(n, 0.0);
  for (size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (size_t j = ri + 1; j < n; j++) acc -= a(ri, j) * x[j];
    x[ri] = acc / a(ri, ri);
  }
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Used only by
// tests that probe payoff curvature, so plain and slow is fine.
inline std::vector<double> symmetric_eigenvalues(Matrix a, int sweeps = 60) {
  const size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("symmetric_eigenvalues: not square");
  for (int sweep = 0; sweep < sweeps; sweep++) {
    double off = 0.0;
    for (size_t i = 0; i < n; i++)
      for (size_t j = i + 1; j < n; j++) off += a(i, j) * a(i, j);
    if (off < 1e-28) break;
    for (size_t p = 0; p < n; p++) {
      for (size_t q = p + 1; q < n; q++) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        const double c = std::cos(theta), s = std::sin(theta);
        for (size_t k = 0; k < n; k++) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; k++) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; i++) ev[i] = a(i, i);
  return ev;
}

}  // namespace contestnet

#endif
