#pragma once

#include <memory>
#include <string>

#include "harmform/lie_algebra.hpp"

namespace harmform {

// Inclusion of a compact subalgebra k into an ambient algebra g.  The
// sub-algebra carries its own block list (center first when present, then
// simple ideals); the inclusion matrix maps sub coordinates to ambient
// coordinates.  Construction verifies the homomorphism property and that the
// columns are independent.
class Embedding {
 public:
  Embedding(std::shared_ptr<const LieAlgebra> ambient, LieAlgebra sub,
            Eigen::MatrixXd inclusion);

  static Embedding trivial(std::shared_ptr<const LieAlgebra> ambient);

  const LieAlgebra& ambient() const { return *ambient_; }
  std::shared_ptr<const LieAlgebra> ambient_ptr() const { return ambient_; }
  const LieAlgebra& sub() const { return sub_; }
  const Eigen::MatrixXd& inclusion() const { return inclusion_; }

  int sub_dim() const { return static_cast<int>(inclusion_.cols()); }
  int s() const;           // simple ideals of g
  int t() const;           // simple ideals of k
  int center_dim() const;  // dim z(k)

  // Non-center ideal blocks of g / blocks of k, in order.
  const std::vector<IdealBlock>& g_ideals() const { return g_ideals_; }
  const std::vector<IdealBlock>& k_blocks() const { return sub_.ideal_blocks(); }

  // Rows of the inclusion belonging to ideal i of g (the projection pi_i).
  Eigen::MatrixXd ideal_projection(int i) const;

  const BilinearForm& ambient_killing() const { return kappa_g_; }
  const BilinearForm& sub_killing() const { return kappa_k_; }

  double homomorphism_residual() const { return hom_residual_; }

 private:
  std::shared_ptr<const LieAlgebra> ambient_;
  LieAlgebra sub_;
  Eigen::MatrixXd inclusion_;
  std::vector<IdealBlock> g_ideals_;
  BilinearForm kappa_g_, kappa_k_;
  double hom_residual_ = 0.0;
};

// Stacks per-ideal inclusion maps iota(Z) = (iota_1(Z),...,iota_s(Z)).
// Each entry is dim(g_i) x dim(k), or an empty matrix for the zero map.
Embedding diagonal_embedding(std::shared_ptr<const LieAlgebra> ambient,
                             LieAlgebra sub,
                             const std::vector<Eigen::MatrixXd>& per_ideal);

struct KillingConstants {
  Eigen::MatrixXd c;  // s x (t+1); column 0 is the center (always zero)
  double ratio_residual = 0.0;  // worst proportionality defect
};
// Ratios kappa_{pi_i(k_j)} = c_ij kappa_{g_i}| by least squares over the
// restricted Gram matrices.  Throws when a restriction is not proportional.
KillingConstants killing_constants(const Embedding& e);

struct AlignmentData {
  bool is_aligned = false;
  Eigen::VectorXd c;       // c_1..c_s, normalized so sum 1/c_i = 1
  Eigen::VectorXd lambda;  // lambda_1..lambda_t
  Eigen::MatrixXd killing; // the killing-constant matrix, s x (t+1)
  std::string diagnostics;
};
AlignmentData alignment_check(const Embedding& e);

// Rank-one factorization c_ij = c_i * lambda_j with sum 1/c_i = 1, on a bare
// constant matrix (s x t, simple-block columns only).
struct AlignedFactors {
  bool ok = false;
  Eigen::VectorXd c, lambda;
  double residual = 0.0;
};
AlignedFactors align_constants(const Eigen::MatrixXd& cij);

struct ThirdCohomology {
  int b3 = 0;
  int d_gk = 0;
  Eigen::MatrixXd kernel;  // s x b3, basis of admissible y-vectors
};
// Dimension of {Q bi-invariant : Q|_{k x k} = 0} and hence b3 = s - d_{G/K}.
ThirdCohomology b3_dimension(const Embedding& e);

}  // namespace harmform
