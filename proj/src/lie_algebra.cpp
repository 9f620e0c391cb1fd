#include "harmform/lie_algebra.hpp"

#include <complex>
#include <stdexcept>

#include "harmform/linalg.hpp"
#include "harmform/tolerances.hpp"

namespace harmform {

namespace {

// Structure constants of a matrix Lie algebra from brackets, expanding in a
// basis that is orthonormal w.r.t. ip(X,Y) = -2 Re tr(XY) (or any positive
// multiple: coefficients are normalized by the basis norms).
std::vector<Eigen::MatrixXd> structure_from_matrices(
    const std::vector<Eigen::MatrixXcd>& basis) {
  const int n = static_cast<int>(basis.size());
  auto ip = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    return -2.0 * (x * y).trace().real();
  };
  Eigen::VectorXd norms(n);
  for (int k = 0; k < n; ++k) norms(k) = ip(basis[k], basis[k]);
  std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::MatrixXcd br = basis[i] * basis[j] - basis[j] * basis[i];
      for (int k = 0; k < n; ++k) {
        double coef = ip(br, basis[k]) / norms(k);
        if (std::abs(coef) < 1e-14) coef = 0.0;
        c[k](i, j) = coef;
        c[k](j, i) = -coef;
      }
    }
  return c;
}

}  // namespace

LieAlgebra::LieAlgebra(std::vector<Eigen::MatrixXd> bracket_to,
                       std::vector<IdealBlock> ideal_blocks,
                       std::vector<std::string> basis_labels, bool validate)
    : dim_(static_cast<int>(bracket_to.size())),
      c_(std::move(bracket_to)),
      blocks_(std::move(ideal_blocks)),
      labels_(std::move(basis_labels)) {
  if (blocks_.empty()) blocks_.push_back({"g1", 0, dim_, false});
  if (labels_.empty())
    for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i + 1));
  if (!validate) return;
  for (int k = 0; k < dim_; ++k) {
    double anti = (c_[k] + c_[k].transpose()).cwiseAbs().maxCoeff();
    if (anti > tol::abs_floor)
      throw std::invalid_argument("LieAlgebra: structure tensor not antisymmetric");
  }
  // brackets must respect the ideal blocks
  for (const auto& blk : blocks_)
    for (int k = 0; k < dim_; ++k) {
      bool k_inside = k >= blk.begin && k < blk.end();
      double leak = 0.0;
      if (k_inside) continue;
      leak = c_[k].block(blk.begin, blk.begin, blk.size, blk.size).cwiseAbs().maxCoeff();
      if (blk.size > 0 && leak > tol::abs_floor)
        throw std::invalid_argument("LieAlgebra: brackets leak across ideal blocks");
    }
  double jac = jacobi_residual(*this);
  if (jac > 1e-10)
    throw std::invalid_argument("LieAlgebra: Jacobi residual " + std::to_string(jac));
}

int LieAlgebra::simple_count() const {
  int s = 0;
  for (const auto& b : blocks_)
    if (!b.center) ++s;
  return s;
}

Eigen::VectorXd LieAlgebra::bracket(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw std::invalid_argument("bracket: dimension mismatch");
  Eigen::VectorXd out(dim_);
  for (int k = 0; k < dim_; ++k) out(k) = x.dot(c_[k] * y);
  return out;
}

Eigen::MatrixXd LieAlgebra::ad(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("ad: dimension mismatch");
  Eigen::MatrixXd m(dim_, dim_);
  for (int k = 0; k < dim_; ++k) m.row(k) = x.transpose() * c_[k];
  return m;
}

LieAlgebra LieAlgebra::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != dim_)
    throw std::invalid_argument("permuted: bad permutation size");
  std::vector<Eigen::MatrixXd> c(dim_, Eigen::MatrixXd::Zero(dim_, dim_));
  std::vector<std::string> labels(dim_);
  for (int k = 0; k < dim_; ++k) {
    labels[k] = labels_[perm[k]];
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) c[k](i, j) = c_[perm[k]](perm[i], perm[j]);
  }
  return LieAlgebra(std::move(c), blocks_, std::move(labels), false);
}

std::vector<Eigen::MatrixXcd> su_matrices(int n) {
  if (n < 2) throw std::invalid_argument("su(n): need n >= 2");
  using cd = std::complex<double>;
  const cd im(0.0, 1.0);
  std::vector<Eigen::MatrixXcd> basis;
  // traceless diagonal generators i*diag(1,..,1,-m,0,..)/sqrt(2m(m+1))
  for (int m = 1; m < n; ++m) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
    double norm = std::sqrt(2.0 * m * (m + 1));
    for (int a = 0; a < m; ++a) d(a, a) = im / norm;
    d(m, m) = -im * static_cast<double>(m) / norm;
    basis.push_back(d);
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Eigen::MatrixXcd asym = Eigen::MatrixXcd::Zero(n, n);
      asym(a, b) = 0.5;
      asym(b, a) = -0.5;
      basis.push_back(asym);
      Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(n, n);
      sym(a, b) = 0.5 * im;
      sym(b, a) = 0.5 * im;
      basis.push_back(sym);
    }
  return basis;
}

std::vector<Eigen::MatrixXcd> so_matrices(int n) {
  if (n < 3) throw std::invalid_argument("so(n): need n >= 3");
  std::vector<Eigen::MatrixXcd> basis;
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
      m(r, s) = 1.0;
      m(s, r) = -1.0;
      basis.push_back(m);
    }
  return basis;
}

LieAlgebra su(int n) {
  std::vector<Eigen::MatrixXcd> basis = su_matrices(n);
  std::vector<std::string> labels;
  for (int m = 1; m < n; ++m) labels.push_back("D" + std::to_string(m));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      labels.push_back("A" + std::to_string(a + 1) + std::to_string(b + 1));
      labels.push_back("S" + std::to_string(a + 1) + std::to_string(b + 1));
    }
  int dim = n * n - 1;
  std::string name = "su(" + std::to_string(n) + ")";
  return LieAlgebra(structure_from_matrices(basis), {{name, 0, dim, false}},
                    std::move(labels));
}

LieAlgebra su3_adapted() {
  // Reorder su(3) = [D1,D2,A12,S12,A13,S13,A23,S23] so that the diagonal
  // generators come first and the off-diagonal pairs (e3,e6),(e4,e7),(e5,e8)
  // close into the torus: [e3,e6], [e4,e7], [e5,e8] are the only brackets
  // with e1/e2 components.
  return su(3).permuted({0, 1, 7, 4, 2, 6, 5, 3});
}

LieAlgebra so(int n) {
  if (n == 4)
    throw std::invalid_argument("so(4) is not simple; build so(3)+so(3) instead");
  std::vector<Eigen::MatrixXcd> basis = so_matrices(n);
  std::vector<std::string> labels;
  for (int r = 0; r < n; ++r)
    for (int s = r + 1; s < n; ++s)
      labels.push_back("e" + std::to_string(r + 1) + std::to_string(s + 1));
  int dim = n * (n - 1) / 2;
  std::string name = "so(" + std::to_string(n) + ")";
  return LieAlgebra(structure_from_matrices(basis), {{name, 0, dim, false}},
                    std::move(labels));
}

LieAlgebra abelian(int dim) {
  if (dim < 1) throw std::invalid_argument("abelian: need dim >= 1");
  std::vector<Eigen::MatrixXd> c(dim, Eigen::MatrixXd::Zero(dim, dim));
  return LieAlgebra(std::move(c), {{"z", 0, dim, true}}, {});
}

LieAlgebra direct_sum(const std::vector<LieAlgebra>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: empty list");
  int dim = 0;
  for (const auto& p : parts) dim += p.dim();
  std::vector<Eigen::MatrixXd> c(dim, Eigen::MatrixXd::Zero(dim, dim));
  std::vector<IdealBlock> blocks;
  std::vector<std::string> labels;
  int off = 0, gi = 0;
  for (const auto& p : parts) {
    for (const auto& blk : p.ideal_blocks()) {
      ++gi;
      blocks.push_back({"g" + std::to_string(gi) + ":" + blk.label,
                        off + blk.begin, blk.size, blk.center});
    }
    for (int k = 0; k < p.dim(); ++k) {
      c[off + k].block(off, off, p.dim(), p.dim()) = p.bracket_component(k);
      labels.push_back("g" + std::to_string(gi) + "." + p.basis_labels()[k]);
    }
    off += p.dim();
  }
  return LieAlgebra(std::move(c), std::move(blocks), std::move(labels), false);
}

Eigen::MatrixXd ad_matrix(const LieAlgebra& alg, const Eigen::VectorXd& x) {
  return alg.ad(x);
}

BilinearForm killing_form(const LieAlgebra& alg) {
  const int n = alg.dim();
  std::vector<Eigen::MatrixXd> ads(n);
  for (int i = 0; i < n; ++i)
    ads[i] = alg.ad(Eigen::VectorXd::Unit(n, i));
  BilinearForm kf;
  kf.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = (ads[i] * ads[j]).trace();
      kf.matrix(i, j) = v;
      kf.matrix(j, i) = v;
    }
  kf.ad_invariant = true;
  return kf;
}

double jacobi_residual(const LieAlgebra& alg) {
  // J(i,j,k,l) = sum_m c_ij^m c_mk^l + c_jk^m c_mi^l + c_ki^m c_mj^l,
  // evaluated without assuming antisymmetry of the stored tensor:
  // J_ij = ad(b_ij) + M_i ad_j + M_j M_i with M_i(l,m) = c_mi^l.
  const int n = alg.dim();
  std::vector<Eigen::MatrixXd> ads(n), ms(n);
  for (int i = 0; i < n; ++i) {
    ads[i] = alg.ad(Eigen::VectorXd::Unit(n, i));
    ms[i].resize(n, n);
    for (int l = 0; l < n; ++l)
      ms[i].row(l) = alg.bracket_component(l).col(i).transpose();
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd bij(n);
      for (int k = 0; k < n; ++k) bij(k) = alg.structure(i, j, k);
      Eigen::MatrixXd jac = alg.ad(bij) + ms[i] * ads[j] + ms[j] * ms[i];
      worst = std::max(worst, jac.cwiseAbs().maxCoeff());
    }
  return worst;
}

double ad_invariance_residual(const LieAlgebra& alg, const BilinearForm& b) {
  const int n = alg.dim();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd adi = alg.ad(Eigen::VectorXd::Unit(n, i));
    // B(ad_i y, z) + B(y, ad_i z) as a matrix identity
    Eigen::MatrixXd gap = adi.transpose() * b.matrix + b.matrix * adi;
    worst = std::max(worst, gap.cwiseAbs().maxCoeff());
  }
  return worst;
}

BilinearForm restrict_form(const BilinearForm& b, const Eigen::MatrixXd& s) {
  if (s.rows() != b.matrix.rows())
    throw std::invalid_argument("restrict_form: dimension mismatch");
  if (numeric_rank(s, tol::kernel) < s.cols())
    throw std::invalid_argument("restrict_form: rank-deficient subspace basis");
  return {s.transpose() * b.matrix * s, b.ad_invariant};
}

}  // namespace harmform
