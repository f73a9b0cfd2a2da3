#ifndef QNP_ORACLE_HPP
#define QNP_ORACLE_HPP

// Reference direct solves (sparse LU) for checking the iterative solvers.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"

namespace qnp {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Row-major cell numbering: unknown (i, j) is i * W + j.
inline int cell_index(int i, int j, int cols) { return i * cols + j; }

/// The matrix of `kernel` applied with the boundary rule of `bc` on an H x W
/// grid: Dirichlet ghosts drop out, Neumann ghosts fold onto the adjacent cell.
inline SparseMatrix assemble_kernel_matrix(const Kernel3x3& kernel, int rows, int cols, const BoundarySpec& bc) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 9);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const double w = kernel.at(dr, dc);
          if (w == 0.0) continue;
          int si = i - dr;
          int sj = j - dc;
          if (si < 0 && bc.bottom == BoundaryKind::kDirichletZero) continue;
          if (si >= rows && bc.top == BoundaryKind::kDirichletZero) continue;
          if (sj < 0 && bc.left == BoundaryKind::kDirichletZero) continue;
          if (sj >= cols && bc.right == BoundaryKind::kDirichletZero) continue;
          si = std::clamp(si, 0, rows - 1);
          sj = std::clamp(sj, 0, cols - 1);
          t.emplace_back(cell_index(i, j, cols), cell_index(si, sj, cols), w);
        }
      }
    }
  }
  SparseMatrix a(rows * cols, rows * cols);
  a.setFromTriplets(t.begin(), t.end());  // duplicates (folded ghosts) are summed
  return a;
}

inline Eigen::VectorXd flatten(const Array2D& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v[static_cast<Eigen::Index>(k)] = a.storage()[k];
  return v;
}

inline Array2D unflatten(const Eigen::VectorXd& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) throw ShapeMismatch("vector length does not match grid");
  return Array2D(rows, cols, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Solves A x = b by sparse LU.
inline Eigen::VectorXd direct_sparse_solve(const SparseMatrix& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw ShapeMismatch("matrix and right-hand side sizes differ");
  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw DegenerateOperator("direct oracle: singular matrix");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw DegenerateOperator("direct oracle: solve failed");
  return x;
}

/// Reference solution of kernel * x = b under b's boundary rule.
inline Field2D direct_sparse_oracle(const Kernel3x3& kernel, const Field2D& b) {
  const SparseMatrix a = assemble_kernel_matrix(kernel, b.rows(), b.cols(), b.bc);
  Field2D x = b.like();
  x.values = unflatten(direct_sparse_solve(a, flatten(b.values)), b.rows(), b.cols());
  return x;
}

/// Reference solution for an explicitly assembled matrix.
inline Field2D direct_sparse_oracle(const SparseMatrix& a, const Field2D& b) {
  Field2D x = b.like();
  x.values = unflatten(direct_sparse_solve(a, flatten(b.values)), b.rows(), b.cols());
  return x;
}

}  // namespace qnp

#endif  // QNP_ORACLE_HPP
