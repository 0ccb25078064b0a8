#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace nscon {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything here runs at desk scale (n <= ~50),
// so no sparsity and no BLAS.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  Vec row(int i) const;
  Mat transposed() const;

  bool operator==(const Mat& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

Vec matvec(const Mat& m, const Vec& x);
Mat matmul(const Mat& a, const Mat& b);

double dot(const Vec& a, const Vec& b);
double norm_inf(const Vec& v);
double norm_inf(const Mat& m);  // induced: max absolute row sum
double norm1(const Vec& v);

Vec scaled(const Vec& v, double s);
Vec axpy(double a, const Vec& x, const Vec& y);  // a*x + y

// Solves A x = b by LU with partial pivoting; nullopt when A is singular
// to working precision.
std::optional<Vec> lu_solve(Mat a, Vec b);

// Eigenvalues of a symmetric matrix via cyclic Jacobi, ascending order.
Vec symmetric_eigenvalues(Mat a, double tol = 1e-13, int max_sweeps = 100);

}  // namespace nscon
