#pragma once

#include <Eigen/Dense>

namespace harmform {

// Right null space of A via SVD; singular values below
// tau*max(1, sigma_max) count as zero.  Columns are orthonormal.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double tau);

// Kernel of a symmetric PSD matrix via eigendecomposition with the same
// thresholding rule.  Columns are orthonormal.
Eigen::MatrixXd sym_kernel(const Eigen::MatrixXd& s, double tau);

int numeric_rank(const Eigen::MatrixXd& a, double tau);

// Given columns `basis` spanning a subspace and an SPD ambient Gram matrix,
// returns new columns spanning the same subspace that are orthonormal with
// respect to the Gram.  Pure rescaling when the restricted Gram is diagonal,
// so structured bases keep their direction labels.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& basis,
                               const Eigen::MatrixXd& gram);

// Distance between the gram-orthogonal projectors onto the column spans of
// u and v (columns gram-orthonormal).
double projector_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                          const Eigen::MatrixXd& gram);

}  // namespace harmform
