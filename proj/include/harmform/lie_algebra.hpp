#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace harmform {

struct IdealBlock {
  std::string label;
  int begin = 0;
  int size = 0;
  bool center = false;  // abelian block (center of the algebra)
  int end() const { return begin + size; }
};

// Symmetric bilinear form on a Lie algebra, in basis coordinates.
struct BilinearForm {
  Eigen::MatrixXd matrix;
  bool ad_invariant = false;
};

// A compact Lie algebra as a structure-constant tensor over a fixed basis,
// with bookkeeping for its simple ideals.  Values are immutable after
// construction and safe to share across threads.
class LieAlgebra {
 public:
  // bracket_to[k](i,j) is the e_k-coefficient of [e_i, e_j].
  LieAlgebra(std::vector<Eigen::MatrixXd> bracket_to,
             std::vector<IdealBlock> ideal_blocks,
             std::vector<std::string> basis_labels, bool validate = true);

  int dim() const { return dim_; }
  const std::vector<IdealBlock>& ideal_blocks() const { return blocks_; }
  const std::vector<std::string>& basis_labels() const { return labels_; }
  int simple_count() const;  // number of non-center blocks

  double structure(int i, int j, int k) const { return c_[k](i, j); }
  const Eigen::MatrixXd& bracket_component(int k) const { return c_[k]; }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) const;
  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const;

  // Same algebra with basis e'_new = e_old[perm[new]].
  LieAlgebra permuted(const std::vector<int>& perm) const;

 private:
  int dim_;
  std::vector<Eigen::MatrixXd> c_;
  std::vector<IdealBlock> blocks_;
  std::vector<std::string> labels_;
};

// su(n), n >= 2, basis orthonormal w.r.t. -2 Re tr(XY): first the n-1
// traceless diagonal generators, then per index pair a<b the antisymmetric
// and imaginary-symmetric off-diagonal generators.
LieAlgebra su(int n);

// Matrix realizations of the constructor bases, in the same order.
std::vector<Eigen::MatrixXcd> su_matrices(int n);
std::vector<Eigen::MatrixXcd> so_matrices(int n);

// su(3) permuted to the torus-adapted ordering in which the only brackets
// with components along the torus e_1,e_2 are
//   [e_3,e_6] = c*e_1 - ... , [e_4,e_7], [e_5,e_8];
// the ordering used by the diagonal-metric harmonicity formulas.
LieAlgebra su3_adapted();

// so(n), n >= 3, n != 4, basis {E_rs - E_sr : r < s} in lexicographic order
// (unnormalized; kappa = -2(n-2) I in this basis).
LieAlgebra so(int n);

// Abelian algebra of the given dimension (zero bracket).
LieAlgebra abelian(int dim);

LieAlgebra direct_sum(const std::vector<LieAlgebra>& parts);

// ad_matrix of a coefficient vector.
Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, const Eigen::VectorXd& x);

// kappa(X,Y) = tr(ad X ad Y), always computed from the structure constants.
BilinearForm killing_form(const LieAlgebra& alg);

// Max-norm of the Jacobi tensor; zero for genuine Lie algebras.
double jacobi_residual(const LieAlgebra& alg);

// Max over basis triples of |B([x,y],z) + B(y,[x,z])|.
double ad_invariance_residual(const LieAlgebra& alg, const BilinearForm& b);

// Restriction S^T B S onto the span of the columns of S.
// Throws when the columns are rank deficient.
BilinearForm restrict_form(const BilinearForm& b, const Eigen::MatrixXd& s);

}  // namespace harmform
