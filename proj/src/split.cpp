#include "harmform/split.hpp"

#include <map>
#include <stdexcept>

#include "harmform/linalg.hpp"
#include "harmform/tolerances.hpp"

namespace harmform {

namespace {
constexpr int kMaxPDim = 24;  // dense Lambda^k sizes stay manageable below this
}

Eigen::MatrixXd bi_invariant_gram(const LieAlgebra& g, const Eigen::VectorXd& z) {
  Eigen::MatrixXd kappa = killing_form(g).matrix;
  Eigen::MatrixXd gb = Eigen::MatrixXd::Zero(g.dim(), g.dim());
  int zi = 0;
  for (const auto& blk : g.ideal_blocks()) {
    if (blk.center) {
      gb.block(blk.begin, blk.begin, blk.size, blk.size) =
          Eigen::MatrixXd::Identity(blk.size, blk.size);
      continue;
    }
    if (zi >= z.size())
      throw std::invalid_argument("bi_invariant_gram: z too short");
    if (z(zi) <= 0.0)
      throw std::invalid_argument("bi_invariant_gram: z must be positive");
    gb.block(blk.begin, blk.begin, blk.size, blk.size) =
        -z(zi) * kappa.block(blk.begin, blk.begin, blk.size, blk.size);
    ++zi;
  }
  if (zi != z.size())
    throw std::invalid_argument("bi_invariant_gram: z has wrong length");
  return gb;
}

ReductiveSplit::ReductiveSplit(std::shared_ptr<const Embedding> emb,
                               Eigen::VectorXd z, Eigen::MatrixXd p_basis,
                               std::vector<Block> blocks,
                               std::optional<AlignedInfo> aligned)
    : emb_(std::move(emb)),
      z_(std::move(z)),
      p_basis_(std::move(p_basis)),
      blocks_(std::move(blocks)),
      aligned_(std::move(aligned)) {
  const LieAlgebra& g = emb_->ambient();
  const int m = p_dim();
  if (m > kMaxPDim)
    throw std::invalid_argument("ReductiveSplit: dim p = " + std::to_string(m) +
                                " exceeds the supported bound " +
                                std::to_string(kMaxPDim));
  gb_ = bi_invariant_gram(g, z_);
  block_of_.assign(m, 0);
  for (size_t b = 0; b < blocks_.size(); ++b)
    for (int i = blocks_[b].begin; i < blocks_[b].end(); ++i)
      block_of_[i] = static_cast<int>(b);

  // g_b-orthonormal basis of k
  if (aligned_) {
    k_basis_ = aligned_->adapted_k / std::sqrt(aligned_->k_norm_sq);
  } else if (emb_->sub_dim() > 0) {
    k_basis_ = orthonormalize(emb_->inclusion(), gb_);
  } else {
    k_basis_.resize(g.dim(), 0);
  }

  // bracket tables
  const int npairs = m * (m - 1) / 2;
  pair_full_.resize(g.dim(), npairs);
  pair_rank_.assign(m * m, -1);
  int r = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++r) {
      pair_rank_[i * m + j] = r;
      pair_full_.col(r) = g.bracket(p_basis_.col(i), p_basis_.col(j));
    }
  Eigen::MatrixXd pg = p_basis_.transpose() * gb_;  // m x dim_g
  p_struct_.assign(m, Eigen::MatrixXd::Zero(m, m));
  pair_p_ = pg * pair_full_;  // m x npairs
  r = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++r)
      for (int k = 0; k < m; ++k) {
        p_struct_[k](i, j) = pair_p_(k, r);
        p_struct_[k](j, i) = -pair_p_(k, r);
      }

  isotropy_.resize(k_dim());
  for (int a = 0; a < k_dim(); ++a) {
    Eigen::MatrixXd img(g.dim(), m);
    for (int j = 0; j < m; ++j)
      img.col(j) = g.bracket(k_basis_.col(a), p_basis_.col(j));
    isotropy_[a] = pg * img;
  }
}

const AlignedInfo& ReductiveSplit::aligned_info() const {
  if (!aligned_) throw std::logic_error("split is not aligned");
  return *aligned_;
}

Eigen::VectorXd ReductiveSplit::bracket_full(int i, int j) const {
  if (i == j) return Eigen::VectorXd::Zero(algebra().dim());
  const int m = p_dim();
  if (i < j) return pair_full_.col(pair_rank_[i * m + j]);
  return -pair_full_.col(pair_rank_[j * m + i]);
}

Eigen::VectorXd ReductiveSplit::bracket_p(int i, int j) const {
  Eigen::VectorXd out(p_dim());
  for (int k = 0; k < p_dim(); ++k) out(k) = p_struct_[k](i, j);
  return out;
}

Eigen::VectorXd ReductiveSplit::bracket_k(int i, int j) const {
  return k_basis_.transpose() * gb_ * bracket_full(i, j);
}

double ReductiveSplit::consistency_residual() const {
  double worst = 0.0;
  const int m = p_dim();
  Eigen::MatrixXd gram = p_basis_.transpose() * gb_ * p_basis_;
  worst = (gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  if (k_dim() > 0) {
    worst = std::max(worst,
                     (k_basis_.transpose() * gb_ * p_basis_).cwiseAbs().maxCoeff());
    Eigen::MatrixXd kg = k_basis_.transpose() * gb_ * k_basis_;
    worst = std::max(worst, (kg - Eigen::MatrixXd::Identity(k_dim(), k_dim()))
                                .cwiseAbs()
                                .maxCoeff());
  }
  // blocks must be Ad(K)-invariant: isotropy maps may not mix blocks
  for (int a = 0; a < k_dim(); ++a)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (block_of_[i] != block_of_[j])
          worst = std::max(worst, std::abs(isotropy_[a](i, j)));
  return worst;
}

namespace {

// g_b-orthonormal basis of the kappa-orthocomplement of pi_i(k) inside the
// ideal block, as ambient-coordinate columns.
Eigen::MatrixXd ideal_complement(const Embedding& e, const Eigen::MatrixXd& gb,
                                 int i) {
  const auto& blk = e.g_ideals()[i];
  Eigen::MatrixXd gi = gb.block(blk.begin, blk.begin, blk.size, blk.size);
  Eigen::MatrixXd proj = e.sub_dim() > 0
                             ? Eigen::MatrixXd(e.ideal_projection(i))
                             : Eigen::MatrixXd::Zero(blk.size, 0);
  Eigen::MatrixXd local;
  if (proj.cols() == 0 || proj.cwiseAbs().maxCoeff() < 1e-12) {
    local = Eigen::MatrixXd::Identity(blk.size, blk.size);
  } else {
    local = nullspace(proj.transpose() * gi, tol::kernel);
  }
  Eigen::MatrixXd ambient = Eigen::MatrixXd::Zero(gb.rows(), local.cols());
  ambient.middleRows(blk.begin, blk.size) = local;
  return orthonormalize(ambient, gb);
}

}  // namespace

ReductiveSplit aligned_split(std::shared_ptr<const Embedding> e,
                             const AlignmentData& a, Eigen::VectorXd z) {
  if (!a.is_aligned)
    throw std::invalid_argument("aligned_split: input is not aligned");
  const int s = e->s();
  if (z.size() != s) throw std::invalid_argument("aligned_split: z length != s");
  if (z.minCoeff() <= 0.0)
    throw std::invalid_argument("aligned_split: z must be positive");
  const LieAlgebra& g = e->ambient();
  Eigen::MatrixXd gb = bi_invariant_gram(g, z);

  AlignedInfo info;
  info.c = a.c;
  info.lambda = a.lambda;

  // <,>-orthonormal adapted basis of k, center block first
  const int dk = e->sub_dim();
  Eigen::MatrixXd kappa_k_amb =
      -(e->inclusion().transpose() * e->ambient_killing().matrix * e->inclusion());
  std::vector<const IdealBlock*> order;
  for (const auto& kb : e->k_blocks())
    if (kb.center && kb.size > 0) order.push_back(&kb);
  for (const auto& kb : e->k_blocks())
    if (!kb.center && kb.size > 0) order.push_back(&kb);
  info.adapted_k.resize(g.dim(), dk);
  int col = 0;
  for (const auto* kb : order) {
    Eigen::MatrixXd cols = e->inclusion().middleCols(kb->begin, kb->size);
    Eigen::MatrixXd gram = kappa_k_amb.block(kb->begin, kb->begin, kb->size, kb->size);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("aligned_split: -kappa_g|_k not positive definite");
    info.adapted_k.middleCols(col, kb->size) =
        llt.matrixL().transpose().solve<Eigen::OnTheRight>(cols);
    col += kb->size;
  }

  // eta vectors and the attached constants
  Eigen::VectorXd zc(s);
  for (int i = 0; i < s; ++i) zc(i) = z(i) / a.c(i);
  info.eta.resize(std::max(0, s - 1), s);
  info.tail_coeff.resize(std::max(0, s - 1));
  info.norm_sq.resize(std::max(0, s - 1));
  info.cubic_sum.resize(std::max(0, s - 1));
  double partial = 0.0;
  for (int j = 0; j < s - 1; ++j) {
    partial += zc(j);
    double tail = -(a.c(j + 1) / z(j + 1)) * partial;
    info.eta.row(j).setZero();
    for (int l = 0; l <= j; ++l) info.eta(j, l) = 1.0;
    info.eta(j, j + 1) = tail;
    info.tail_coeff(j) = tail;
    info.norm_sq(j) = partial + tail * tail * zc(j + 1);
    info.cubic_sum(j) = partial + tail * tail * tail * zc(j + 1);
  }
  info.k_norm_sq = zc.sum();

  // blocks: p_i = complement of pi_i(k) in g_i, then g_{eta_j}
  std::vector<Block> blocks;
  std::vector<Eigen::MatrixXd> pieces;
  int offset = 0;
  for (int i = 0; i < s; ++i) {
    Eigen::MatrixXd q = ideal_complement(*e, gb, i);
    blocks.push_back({"p" + std::to_string(i + 1), offset,
                      static_cast<int>(q.cols())});
    offset += static_cast<int>(q.cols());
    pieces.push_back(q);
  }
  for (int j = 0; j < s - 1; ++j) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(g.dim(), dk);
    for (int l = 0; l < s; ++l) {
      if (info.eta(j, l) == 0.0) continue;
      const auto& blk = e->g_ideals()[l];
      phi.middleRows(blk.begin, blk.size) +=
          info.eta(j, l) * info.adapted_k.middleRows(blk.begin, blk.size);
    }
    phi /= std::sqrt(info.norm_sq(j));
    blocks.push_back({"p" + std::to_string(s + j + 1), offset, dk});
    offset += dk;
    pieces.push_back(phi);
  }
  Eigen::MatrixXd p_basis(g.dim(), offset);
  int at = 0;
  for (const auto& piece : pieces) {
    p_basis.middleCols(at, piece.cols()) = piece;
    at += static_cast<int>(piece.cols());
  }
  return ReductiveSplit(std::move(e), std::move(z), std::move(p_basis),
                        std::move(blocks), std::move(info));
}

ReductiveSplit generic_split(std::shared_ptr<const Embedding> e,
                             Eigen::VectorXd z) {
  const int s = e->s();
  const LieAlgebra& g = e->ambient();
  Eigen::MatrixXd gb = bi_invariant_gram(g, z);
  std::vector<Block> blocks;
  std::vector<Eigen::MatrixXd> pieces;
  int offset = 0;
  for (int i = 0; i < s; ++i) {
    Eigen::MatrixXd q = ideal_complement(*e, gb, i);
    blocks.push_back({"p" + std::to_string(i + 1), offset,
                      static_cast<int>(q.cols())});
    offset += static_cast<int>(q.cols());
    pieces.push_back(q);
  }
  const int dk = e->sub_dim();
  if (dk > 0) {
    // remainder of p: orthogonal to k and to every p_i
    Eigen::MatrixXd constraints(dk + offset, g.dim());
    constraints.topRows(dk) = e->inclusion().transpose() * gb;
    int r = dk;
    for (const auto& piece : pieces) {
      constraints.middleRows(r, piece.cols()) = piece.transpose() * gb;
      r += static_cast<int>(piece.cols());
    }
    Eigen::MatrixXd tilde = orthonormalize(nullspace(constraints, tol::kernel), gb);
    if (tilde.cols() > 0) {
      // refine by eigenspaces of the k-Casimir (canonical and Ad(K)-invariant)
      Eigen::MatrixXd kb =
          orthonormalize(e->inclusion(), -e->ambient_killing().matrix);
      Eigen::MatrixXd cas =
          Eigen::MatrixXd::Zero(tilde.cols(), tilde.cols());
      Eigen::MatrixXd tg = tilde.transpose() * gb;
      for (int a = 0; a < dk; ++a) {
        Eigen::MatrixXd img(g.dim(), tilde.cols());
        for (int j = 0; j < tilde.cols(); ++j)
          img.col(j) = g.bracket(kb.col(a), tilde.col(j));
        Eigen::MatrixXd ad_a = tg * img;
        cas -= ad_a * ad_a;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cas);
      const auto& ev = eig.eigenvalues();
      double scale = std::max(1.0, std::abs(ev(ev.size() - 1)));
      int lo = 0;
      while (lo < ev.size()) {
        int hi = lo + 1;
        while (hi < ev.size() && ev(hi) - ev(hi - 1) <= 1e-6 * scale) ++hi;
        Eigen::MatrixXd piece = tilde * eig.eigenvectors().middleCols(lo, hi - lo);
        blocks.push_back({"iso" + std::to_string(blocks.size() + 1), offset,
                          hi - lo});
        offset += hi - lo;
        pieces.push_back(piece);
        lo = hi;
      }
    }
  } else if (offset < g.dim()) {
    // center of g, if any
    Eigen::MatrixXd constraints(offset, g.dim());
    int r = 0;
    for (const auto& piece : pieces) {
      constraints.middleRows(r, piece.cols()) = piece.transpose() * gb;
      r += static_cast<int>(piece.cols());
    }
    Eigen::MatrixXd rest = orthonormalize(nullspace(constraints, tol::kernel), gb);
    blocks.push_back({"z", offset, static_cast<int>(rest.cols())});
    offset += static_cast<int>(rest.cols());
    pieces.push_back(rest);
  }
  Eigen::MatrixXd p_basis(g.dim(), offset);
  int at = 0;
  for (const auto& piece : pieces) {
    p_basis.middleCols(at, piece.cols()) = piece;
    at += static_cast<int>(piece.cols());
  }
  return ReductiveSplit(std::move(e), std::move(z), std::move(p_basis),
                        std::move(blocks), std::nullopt);
}

ReductiveSplit lie_group_split(std::shared_ptr<const LieAlgebra> g,
                               Eigen::VectorXd z, bool per_vector_blocks) {
  auto emb = std::make_shared<Embedding>(Embedding::trivial(g));
  Eigen::MatrixXd gb = bi_invariant_gram(*g, z);
  Eigen::MatrixXd basis =
      orthonormalize(Eigen::MatrixXd::Identity(g->dim(), g->dim()), gb);
  std::vector<Block> blocks;
  if (per_vector_blocks) {
    for (int i = 0; i < g->dim(); ++i)
      blocks.push_back({"x" + std::to_string(i + 1), i, 1});
  } else {
    for (const auto& blk : g->ideal_blocks())
      blocks.push_back({blk.label, blk.begin, blk.size});
  }
  return ReductiveSplit(std::move(emb), std::move(z), std::move(basis),
                        std::move(blocks), std::nullopt);
}

std::string AssumptionReport::summary() const {
  std::string s;
  s += no_adjoint_component
           ? "no isotropy component equivalent to a simple factor of k"
           : "an isotropy component is equivalent to a simple factor of k";
  s += "; ";
  s += center_ok ? "center condition holds" : "center condition fails";
  return s;
}

AssumptionReport assumption_check(const ReductiveSplit& split) {
  const Embedding& e = split.embedding();
  const int s = e.s();
  AssumptionReport rep;
  int t = 0;
  std::vector<const IdealBlock*> simple_k;
  for (const auto& kb : e.k_blocks())
    if (!kb.center && kb.size > 0) {
      simple_k.push_back(&kb);
      ++t;
    }
  rep.intertwiner_dim = Eigen::MatrixXd::Zero(s, t);
  rep.fixed_dim.assign(s, 0);
  const int dk = e.sub_dim();
  if (dk == 0) return rep;

  // k acting in its own adapted coordinates: transform k_basis back
  Eigen::MatrixXd inc_pinv =
      (e.inclusion().transpose() * e.inclusion())
          .ldlt()
          .solve(e.inclusion().transpose());
  for (int i = 0; i < s; ++i) {
    const Block& blk = split.blocks()[i];
    if (blk.size == 0) continue;
    // representation of k on p_i
    std::vector<Eigen::MatrixXd> rho(dk);
    for (int a = 0; a < dk; ++a)
      rho[a] = split.isotropy(a).block(blk.begin, blk.begin, blk.size, blk.size);
    // fixed vectors
    Eigen::MatrixXd stacked(dk * blk.size, blk.size);
    for (int a = 0; a < dk; ++a) stacked.middleRows(a * blk.size, blk.size) = rho[a];
    rep.fixed_dim[i] = static_cast<int>(nullspace(stacked, tol::kernel).cols());
    // intertwiners T: p_i -> k_j with ad(Z) T = T ad(Z)
    for (int j = 0; j < t; ++j) {
      const IdealBlock& kb = *simple_k[j];
      std::vector<Eigen::MatrixXd> adk(dk);
      for (int a = 0; a < dk; ++a) {
        Eigen::VectorXd zk = inc_pinv * split.k_basis().col(a);
        adk[a] = e.sub().ad(zk).block(kb.begin, kb.begin, kb.size, kb.size);
      }
      const int rows = kb.size * blk.size;
      Eigen::MatrixXd sys(dk * rows, rows);
      for (int a = 0; a < dk; ++a) {
        // vec(ad T - T rho) = (I kron ad - rho^T kron I) vec(T)
        Eigen::MatrixXd op = Eigen::MatrixXd::Zero(rows, rows);
        for (int p = 0; p < blk.size; ++p)
          for (int q = 0; q < blk.size; ++q) {
            if (p == q)
              op.block(p * kb.size, p * kb.size, kb.size, kb.size) += adk[a];
            op.block(p * kb.size, q * kb.size, kb.size, kb.size) -=
                rho[a](q, p) * Eigen::MatrixXd::Identity(kb.size, kb.size);
          }
        sys.middleRows(a * rows, rows) = op;
      }
      int dim = static_cast<int>(nullspace(sys, tol::kernel).cols());
      rep.intertwiner_dim(i, j) = dim;
      if (dim > 0) rep.no_adjoint_component = false;
    }
  }
  if (e.center_dim() > 0)
    for (int i = 0; i < s; ++i)
      if (rep.fixed_dim[i] > 0) rep.center_ok = false;
  return rep;
}

}  // namespace harmform
