#pragma once

#include <Eigen/Dense>
#include <vector>

#include "harmform/combinatorics.hpp"

namespace harmform::kernels {

// The hot inner loops of the invariant-form calculus.  Each kernel has a
// plain serial reference implementation and an OpenMP version that computes
// every output entry with the same scalar code path, so results agree
// bitwise.  The parallel versions are used unless use_parallel() is false
// (set HARMFORM_SERIAL=1 to force the reference path).
bool use_parallel();
void set_parallel(bool on);

// Stacked Lie-derivative matrix of the isotropy operators on a set of
// degree-k tuples (row group): rows are (operator, tuple) pairs, columns are
// tuples.  rho[a](r, c) is the e_r-coefficient of [Z_a, e_c].
namespace serial {
Eigen::MatrixXd lie_derivative_stack(const Combinadic& cmb,
                                     const std::vector<int>& rows,
                                     const std::vector<Eigen::MatrixXd>& rho);
}
Eigen::MatrixXd lie_derivative_stack(const Combinadic& cmb,
                                     const std::vector<int>& rows,
                                     const std::vector<Eigen::MatrixXd>& rho);

// Batched exterior differential: columns of `forms` are coefficient vectors
// over increasing degree-k tuples; the result holds the degree-(k+1)
// coefficients of their differentials.  pair_p.col(pair_index[i*m+j]) is
// [e_i,e_j]_p in basis coordinates.
namespace serial {
Eigen::MatrixXd differential_batch(const Combinadic& from, const Combinadic& to,
                                   const Eigen::MatrixXd& pair_p,
                                   const std::vector<int>& pair_index,
                                   const Eigen::MatrixXd& forms);
}
Eigen::MatrixXd differential_batch(const Combinadic& from, const Combinadic& to,
                                   const Eigen::MatrixXd& pair_p,
                                   const std::vector<int>& pair_index,
                                   const Eigen::MatrixXd& forms);

// Inner-product weights of the coordinate tuple basis for a diagonal metric:
// out(I) = k! / prod_{i in I} w_i.
namespace serial {
Eigen::VectorXd tuple_weights(const Combinadic& cmb, const Eigen::VectorXd& w);
}
Eigen::VectorXd tuple_weights(const Combinadic& cmb, const Eigen::VectorXd& w);

}  // namespace harmform::kernels
