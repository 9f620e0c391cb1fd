#pragma once

#include <memory>
#include <optional>
#include <string>

#include "harmform/embedding.hpp"

namespace harmform {

struct Block {
  std::string label;
  int begin = 0;
  int size = 0;
  int end() const { return begin + size; }
};

// Data attached to the aligned block decomposition
// p = p_1 + ... + p_s + g_{eta_1} + ... + g_{eta_{s-1}}.
struct AlignedInfo {
  Eigen::VectorXd c;       // alignment constants c_1..c_s
  Eigen::VectorXd lambda;  // lambda_1..lambda_t
  Eigen::MatrixXd eta;     // rows eta_j, j = 1..s-1
  // Per eta-block constants, indexed j = 0..s-2 for blocks p_{s+1}..p_{2s-1}:
  Eigen::VectorXd tail_coeff;  // last nonzero eta coordinate  (A_{s+j})
  Eigen::VectorXd norm_sq;     // g_b-norm^2 of phi_j(Z), unit <Z>  (B_{s+j})
  Eigen::VectorXd cubic_sum;   // cubic-weight analogue of norm_sq (D_{s+j})
  double k_norm_sq = 0.0;      // g_b-norm^2 of Z itself, unit <Z>  (B_{2s})
  // <,>-orthonormal adapted basis of k (<,> = -kappa_g|_k), ambient coords,
  // ordered center block first, then the simple blocks of k.
  Eigen::MatrixXd adapted_k;
};

// A g_b-orthogonal reductive decomposition g = k + p with a block-decomposed,
// g_b-orthonormal basis of p and the bracket/isotropy tables needed by the
// invariant-form calculus.  Immutable and safe to share across threads.
class ReductiveSplit {
 public:
  ReductiveSplit(std::shared_ptr<const Embedding> emb, Eigen::VectorXd z,
                 Eigen::MatrixXd p_basis, std::vector<Block> blocks,
                 std::optional<AlignedInfo> aligned);

  const Embedding& embedding() const { return *emb_; }
  const LieAlgebra& algebra() const { return emb_->ambient(); }
  const Eigen::VectorXd& z() const { return z_; }
  const Eigen::MatrixXd& gb() const { return gb_; }
  const Eigen::MatrixXd& p_basis() const { return p_basis_; }
  int p_dim() const { return static_cast<int>(p_basis_.cols()); }
  int k_dim() const { return static_cast<int>(k_basis_.cols()); }
  const std::vector<Block>& blocks() const { return blocks_; }
  int block_of(int p_index) const { return block_of_[p_index]; }

  bool aligned() const { return aligned_.has_value(); }
  const AlignedInfo& aligned_info() const;

  // g_b-orthonormal basis of k (ambient coords).  For aligned splits this is
  // the adapted basis scaled by 1/sqrt(k_norm_sq).
  const Eigen::MatrixXd& k_basis() const { return k_basis_; }

  // ad(k_basis_a) restricted to p, in p coordinates.
  const Eigen::MatrixXd& isotropy(int a) const { return isotropy_[a]; }

  // Projected structure constants c[k](i,j) = g_b([u_i,u_j]_p, u_k).
  const std::vector<Eigen::MatrixXd>& p_structure() const { return p_struct_; }

  // Ambient coordinates of the full bracket [u_i, u_j].
  Eigen::VectorXd bracket_full(int i, int j) const;
  // Its p-part in p coordinates / k-part in k_basis coordinates.
  Eigen::VectorXd bracket_p(int i, int j) const;
  Eigen::VectorXd bracket_k(int i, int j) const;

  // Dense table of projected brackets: column pair_index(i,j) holds
  // [u_i,u_j]_p in p coordinates, for i < j.
  const Eigen::MatrixXd& pair_p_matrix() const { return pair_p_; }
  int pair_index(int i, int j) const { return pair_rank_[i * p_dim() + j]; }

  // Worst violation of g_b(k,p)=0, orthonormality and Ad(K)-invariance.
  double consistency_residual() const;

 private:
  std::shared_ptr<const Embedding> emb_;
  Eigen::VectorXd z_;
  Eigen::MatrixXd gb_;
  Eigen::MatrixXd p_basis_;
  std::vector<Block> blocks_;
  std::vector<int> block_of_;
  std::optional<AlignedInfo> aligned_;
  Eigen::MatrixXd k_basis_;
  std::vector<Eigen::MatrixXd> isotropy_;
  std::vector<Eigen::MatrixXd> p_struct_;
  Eigen::MatrixXd pair_full_;  // ambient brackets of basis pairs, column per (i<j)
  Eigen::MatrixXd pair_p_;     // their p-parts in p coordinates
  std::vector<int> pair_rank_;
};

// Gram matrix of g_b = z_1(-kappa_{g_1}) + ... + z_s(-kappa_{g_s}) in ambient
// coordinates (identity on a center block of g, if any).
Eigen::MatrixXd bi_invariant_gram(const LieAlgebra& g, const Eigen::VectorXd& z);

// The aligned decomposition: p_i = g_b-orthocomplement of pi_i(k) in g_i and
// p_{s+j} = g_{eta_j} with the adapted orthonormal bases.
ReductiveSplit aligned_split(std::shared_ptr<const Embedding> e,
                             const AlignmentData& a, Eigen::VectorXd z);

// g_b-orthocomplement of k with blocks p_i = p intersect g_i plus the
// Casimir-eigenspace refinement of the remainder.  Works for any embedding.
ReductiveSplit generic_split(std::shared_ptr<const Embedding> e,
                             Eigen::VectorXd z);

// Lie-group case: K trivial, p = g in the g_b-orthonormalized constructor
// basis.  With per_vector_blocks each basis vector is its own block, so any
// diagonal metric (x_1,...,x_n)_{g_b} is expressible.
ReductiveSplit lie_group_split(std::shared_ptr<const LieAlgebra> g,
                               Eigen::VectorXd z,
                               bool per_vector_blocks = true);

struct AssumptionReport {
  bool no_adjoint_component = true;  // no component of p_1..p_s equivalent to a k_j
  bool center_ok = true;             // z(k) = 0 or no trivial component in p_1..p_s
  Eigen::MatrixXd intertwiner_dim;   // s x t, dim Hom_K(p_i, k_j)
  std::vector<int> fixed_dim;        // per ideal, dim of K-fixed vectors in p_i
  bool ok() const { return no_adjoint_component && center_ok; }
  std::string summary() const;
};
// Equivariant-map dimensions deciding the applicability conditions of the
// closed-form harmonicity criterion.
AssumptionReport assumption_check(const ReductiveSplit& split);

}  // namespace harmform
