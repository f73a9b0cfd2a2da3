#include <gtest/gtest.h>

#include "qnp/oracle.hpp"
#include "qnp/pde_suite.hpp"
#include "test_support.hpp"

using namespace qnp;
using qnp::testing::Gen;

TEST(Oracle, IdentityReturnsRightHandSide) {
  Gen g;
  const Field2D b(g.array(5, 7), 1.0);
  EXPECT_LT(max_abs_diff(direct_sparse_oracle(Kernel3x3::identity(), b).values, b.values), 1e-14);
}

TEST(Oracle, DirichletLaplacianMatchesHandAssembly) {
  const SparseMatrix a = assemble_kernel_matrix(-1.0 * laplacian_fdm_kernel(1.0), 4, 4, BoundarySpec::dirichlet());
  const SparseMatrix ref = linear_system_matrix(4, 4);
  EXPECT_LT((Eigen::MatrixXd(a) - Eigen::MatrixXd(ref)).cwiseAbs().maxCoeff(), 1e-15);
  // corner cell 0 has two neighbours, interior cell 5 has four
  EXPECT_EQ(a.col(0).nonZeros(), 3);
  EXPECT_EQ(a.col(5).nonZeros(), 5);
}

TEST(Oracle, NeumannGhostsFoldOntoTheBoundaryCell) {
  const SparseMatrix a = assemble_kernel_matrix(-1.0 * laplacian_fdm_kernel(1.0), 3, 3, BoundarySpec::neumann());
  const Eigen::MatrixXd d(a);
  // corner: 4 - 2 folded ghosts = 2 on the diagonal
  EXPECT_DOUBLE_EQ(d(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(d(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(d(4, 4), 4.0);
  // rows sum to zero: constants are in the null space
  EXPECT_LT((d * Eigen::VectorXd::Ones(9)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Oracle, AgreesWithKernelApplication) {
  Gen g;
  for (const auto& bc : {BoundarySpec::dirichlet(), BoundarySpec::neumann()}) {
    const Kernel3x3 k = g.kernel();
    const Field2D x(g.array(6, 5), 1.0, bc);
    const Eigen::VectorXd ax = assemble_kernel_matrix(k, 6, 5, bc) * flatten(x.values);
    EXPECT_LT(max_abs_diff(unflatten(ax, 6, 5), apply_kernel(x, k)), 1e-14);
  }
}

TEST(Oracle, SolvesLaplacianSystem) {
  Gen g;
  const Field2D x(g.array(9, 11), 1.0);
  Field2D b = x.like();
  const Kernel3x3 k = -1.0 * laplacian_fdm_kernel(1.0);
  b.values = apply_kernel(x, k);
  EXPECT_LT(max_abs_diff(direct_sparse_oracle(k, b).values, x.values), 1e-12);
}

TEST(Oracle, Errors) {
  EXPECT_THROW(unflatten(Eigen::VectorXd::Zero(5), 2, 3), ShapeMismatch);
  EXPECT_THROW(direct_sparse_oracle(Kernel3x3{}, Field2D(3, 3, 1.0, {}, 1.0)), DegenerateOperator);
}
