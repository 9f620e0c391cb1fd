#include "harmform/embedding.hpp"

#include <stdexcept>

#include "harmform/linalg.hpp"
#include "harmform/tolerances.hpp"

namespace harmform {

Embedding::Embedding(std::shared_ptr<const LieAlgebra> ambient, LieAlgebra sub,
                     Eigen::MatrixXd inclusion)
    : ambient_(std::move(ambient)),
      sub_(std::move(sub)),
      inclusion_(std::move(inclusion)) {
  const int dk = sub_.dim();
  if (inclusion_.rows() != ambient_->dim() ||
      inclusion_.cols() != dk)
    throw std::invalid_argument("Embedding: inclusion has wrong shape");
  for (const auto& blk : ambient_->ideal_blocks())
    if (!blk.center) g_ideals_.push_back(blk);
  if (dk > 0 && numeric_rank(inclusion_, tol::kernel) < dk)
    throw std::invalid_argument("Embedding: inclusion columns dependent");
  // homomorphism certificate
  for (int a = 0; a < dk; ++a)
    for (int b = a + 1; b < dk; ++b) {
      Eigen::VectorXd lhs = inclusion_ * sub_.bracket(Eigen::VectorXd::Unit(dk, a),
                                                      Eigen::VectorXd::Unit(dk, b));
      Eigen::VectorXd rhs =
          ambient_->bracket(inclusion_.col(a), inclusion_.col(b));
      double gap = (lhs - rhs).cwiseAbs().maxCoeff();
      hom_residual_ = std::max(hom_residual_, gap);
      if (gap > 1e-9)
        throw std::invalid_argument(
            "Embedding: not a homomorphism at basis pair (" +
            std::to_string(a) + "," + std::to_string(b) + "), residual " +
            std::to_string(gap));
    }
  kappa_g_ = killing_form(*ambient_);
  kappa_k_ = killing_form(sub_);
}

Embedding Embedding::trivial(std::shared_ptr<const LieAlgebra> ambient) {
  int dg = ambient->dim();
  LieAlgebra none({}, {}, {}, false);
  return Embedding(std::move(ambient), std::move(none),
                   Eigen::MatrixXd::Zero(dg, 0));
}

int Embedding::s() const { return static_cast<int>(g_ideals_.size()); }

int Embedding::t() const {
  int n = 0;
  for (const auto& b : sub_.ideal_blocks())
    if (!b.center && b.size > 0) ++n;
  return n;
}

int Embedding::center_dim() const {
  int n = 0;
  for (const auto& b : sub_.ideal_blocks())
    if (b.center) n += b.size;
  return n;
}

Eigen::MatrixXd Embedding::ideal_projection(int i) const {
  const auto& blk = g_ideals_.at(i);
  return inclusion_.middleRows(blk.begin, blk.size);
}

Embedding diagonal_embedding(std::shared_ptr<const LieAlgebra> ambient,
                             LieAlgebra sub,
                             const std::vector<Eigen::MatrixXd>& per_ideal) {
  std::vector<IdealBlock> ideals;
  for (const auto& blk : ambient->ideal_blocks())
    if (!blk.center) ideals.push_back(blk);
  if (per_ideal.size() != ideals.size())
    throw std::invalid_argument("diagonal_embedding: one map per simple ideal");
  Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(ambient->dim(), sub.dim());
  for (size_t i = 0; i < ideals.size(); ++i) {
    if (per_ideal[i].size() == 0) continue;
    if (per_ideal[i].rows() != ideals[i].size ||
        per_ideal[i].cols() != sub.dim())
      throw std::invalid_argument("diagonal_embedding: factor " +
                                  std::to_string(i) + " has wrong shape");
    inc.middleRows(ideals[i].begin, ideals[i].size) = per_ideal[i];
  }
  return Embedding(std::move(ambient), std::move(sub), std::move(inc));
}

namespace {

// least-squares ratio g2 ~= r*g1 and the relative defect
std::pair<double, double> form_ratio(const Eigen::MatrixXd& g1,
                                     const Eigen::MatrixXd& g2) {
  double denom = g1.cwiseProduct(g1).sum();
  if (denom < tol::abs_floor) return {0.0, 0.0};
  double r = g1.cwiseProduct(g2).sum() / denom;
  double scale = std::max(1.0, g2.cwiseAbs().maxCoeff());
  double defect = (g2 - r * g1).cwiseAbs().maxCoeff() / scale;
  return {r, defect};
}

}  // namespace

KillingConstants killing_constants(const Embedding& e) {
  const int s = e.s();
  const auto& kblocks = e.k_blocks();
  const int t_plus = static_cast<int>(kblocks.size());
  KillingConstants out;
  // column layout: 0 = center, then simple blocks in order
  int tcount = 0;
  for (const auto& kb : kblocks)
    if (!kb.center) ++tcount;
  out.c = Eigen::MatrixXd::Zero(s, tcount + 1);
  int col = 0;
  for (int jb = 0; jb < t_plus; ++jb) {
    const auto& kb = kblocks[jb];
    if (kb.center || kb.size == 0) continue;
    ++col;
    // Gram of kappa_k on this block
    Eigen::MatrixXd gk =
        e.sub_killing().matrix.block(kb.begin, kb.begin, kb.size, kb.size);
    for (int i = 0; i < s; ++i) {
      const auto& gi = e.g_ideals()[i];
      Eigen::MatrixXd proj = e.ideal_projection(i).middleCols(kb.begin, kb.size);
      if (proj.cwiseAbs().maxCoeff() < 1e-10) continue;  // pi_i(k_j) = 0
      Eigen::MatrixXd kgi = e.ambient_killing().matrix.block(
          gi.begin, gi.begin, gi.size, gi.size);
      Eigen::MatrixXd g1 = proj.transpose() * kgi * proj;
      auto [r, defect] = form_ratio(g1, gk);
      out.ratio_residual = std::max(out.ratio_residual, defect);
      if (defect > tol::ratio)
        throw std::runtime_error(
            "killing_constants: restriction of kappa_g" + std::to_string(i + 1) +
            " to k block " + std::to_string(col) + " is not a scalar multiple");
      out.c(i, col) = r;
    }
  }
  return out;
}

AlignedFactors align_constants(const Eigen::MatrixXd& cij) {
  AlignedFactors out;
  const int s = static_cast<int>(cij.rows());
  const int t = static_cast<int>(cij.cols());
  if (t == 0 || s == 0) return out;
  if (cij.minCoeff() <= 0.0) {
    out.residual = 1.0;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cij,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  out.residual = (sv.size() > 1 && sv(0) > 0.0) ? sv(1) / sv(0) : 0.0;
  if (out.residual >= tol::rank1) return out;
  // cij = u * v^T with u > 0 entrywise; rescale so c_i = rho u_i satisfies
  // sum 1/c_i = 1, then lambda_j = v_j / rho.
  Eigen::VectorXd u = svd.matrixU().col(0) * sv(0);
  Eigen::VectorXd v = svd.matrixV().col(0);
  if (u(0) < 0) {
    u = -u;
    v = -v;
  }
  double rho = u.cwiseInverse().sum();
  out.c = rho * u;
  out.lambda = v / rho;
  out.ok = out.c.minCoeff() > 0.0 && out.lambda.minCoeff() > 0.0;
  return out;
}

AlignmentData alignment_check(const Embedding& e) {
  AlignmentData out;
  const int s = e.s();
  const int d0 = e.center_dim();
  KillingConstants kc = killing_constants(e);
  out.killing = kc.c;
  const int t = static_cast<int>(kc.c.cols()) - 1;

  // every ideal must see a nonzero projection of k
  for (int i = 0; i < s; ++i) {
    if (e.sub_dim() == 0) break;
    if (e.ideal_projection(i).cwiseAbs().maxCoeff() < 1e-10) {
      out.diagnostics = "pi_" + std::to_string(i + 1) +
                        "(k) = 0: the space splits off a group factor";
      return out;
    }
  }
  if (e.sub_dim() == 0) {
    out.diagnostics = "k = 0: Lie group case, alignment does not apply";
    return out;
  }

  // center Gram matrices kappa_{g_i}(Z_i, W_i) over a basis of z(k)
  std::vector<Eigen::MatrixXd> center_gram;
  if (d0 > 0) {
    for (int i = 0; i < s; ++i) {
      const auto& gi = e.g_ideals()[i];
      Eigen::MatrixXd kgi = e.ambient_killing().matrix.block(
          gi.begin, gi.begin, gi.size, gi.size);
      for (const auto& kb : e.k_blocks()) {
        if (!kb.center || kb.size == 0) continue;
        Eigen::MatrixXd pi = e.ideal_projection(i).middleCols(kb.begin, kb.size);
        center_gram.push_back(pi.transpose() * kgi * pi);
        break;
      }
    }
  }

  if (t > 0) {
    AlignedFactors f = align_constants(kc.c.rightCols(t));
    if (!f.ok) {
      out.diagnostics = "killing-constant matrix is not positive rank one "
                        "(sigma2/sigma1 = " + std::to_string(f.residual) + ")";
      return out;
    }
    out.c = f.c;
    out.lambda = f.lambda;
  }

  if (d0 > 0) {
    // kappa_{g_i}(Z_i,W_i) = -(1/c_i) <Z,W> with <,> = -kappa_g|_{z(k)}
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(center_gram[0].rows(),
                                              center_gram[0].cols());
    for (const auto& g : center_gram) m -= g;
    if (t == 0) {
      out.c.resize(s);
      for (int i = 0; i < s; ++i) {
        auto [r, defect] = form_ratio(m, -center_gram[i]);
        if (r <= 0.0 || defect > tol::ratio) {
          out.diagnostics = "center embedding not uniform in ideal " +
                            std::to_string(i + 1);
          return out;
        }
        out.c(i) = 1.0 / r;
      }
      out.lambda.resize(0);
    } else {
      for (int i = 0; i < s; ++i) {
        double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        double defect =
            (center_gram[i] + m / out.c(i)).cwiseAbs().maxCoeff() / scale;
        if (defect > tol::ratio) {
          out.diagnostics = "center embedding inconsistent with the "
                            "rank-one constants in ideal " + std::to_string(i + 1);
          return out;
        }
      }
    }
  }

  if (t == 0 && d0 == 0) {
    out.diagnostics = "k = 0";
    return out;
  }
  double gap = std::abs(out.c.cwiseInverse().sum() - 1.0);
  if (gap > 1e-9) {
    out.diagnostics = "normalization sum 1/c_i = 1 violated by " +
                      std::to_string(gap);
    return out;
  }
  out.is_aligned = true;
  out.diagnostics = "aligned";
  return out;
}

ThirdCohomology b3_dimension(const Embedding& e) {
  const int s = e.s();
  std::vector<Eigen::VectorXd> rows;
  // simple blocks: sum over i with pi_i(k_j) != 0 of y_i / c_ij = 0
  KillingConstants kc = killing_constants(e);
  for (int j = 1; j < kc.c.cols(); ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(s);
    for (int i = 0; i < s; ++i)
      if (kc.c(i, j) > 0.0) row(i) = 1.0 / kc.c(i, j);
    rows.push_back(row);
  }
  // center: y must be orthogonal to (kappa_{g_i}(Z^a_i, Z^b_i))_i for a <= b
  for (const auto& kb : e.k_blocks()) {
    if (!kb.center || kb.size == 0) continue;
    for (int a = 0; a < kb.size; ++a)
      for (int b = a; b < kb.size; ++b) {
        Eigen::VectorXd row(s);
        for (int i = 0; i < s; ++i) {
          const auto& gi = e.g_ideals()[i];
          Eigen::MatrixXd kgi = e.ambient_killing().matrix.block(
              gi.begin, gi.begin, gi.size, gi.size);
          Eigen::VectorXd za =
              e.ideal_projection(i).col(kb.begin + a);
          Eigen::VectorXd zb =
              e.ideal_projection(i).col(kb.begin + b);
          row(i) = za.dot(kgi * zb);
        }
        rows.push_back(row);
      }
  }
  Eigen::MatrixXd constraints(static_cast<int>(rows.size()), s);
  for (size_t r = 0; r < rows.size(); ++r) constraints.row(r) = rows[r];
  ThirdCohomology out;
  out.kernel = nullspace(constraints, tol::kernel);
  out.b3 = static_cast<int>(out.kernel.cols());
  out.d_gk = s - out.b3;
  return out;
}

}  // namespace harmform
