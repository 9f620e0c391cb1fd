#include "harmform/exterior.hpp"

#include <stdexcept>

#include "harmform/kernels.hpp"
#include "harmform/linalg.hpp"
#include "harmform/tolerances.hpp"

namespace harmform {

MetricSpec MetricSpec::normal(const ReductiveSplit& split) {
  MetricSpec m;
  m.z = split.z();
  m.x = Eigen::VectorXd::Ones(static_cast<int>(split.blocks().size()));
  return m;
}

double form_value(const Combinadic& cmb, const InvariantForm& f,
                  const std::vector<int>& indices) {
  if (static_cast<int>(indices.size()) != f.degree)
    throw std::invalid_argument("form_value: wrong arity");
  if (f.degree == 0) return f.coeffs(0);
  int sorted[8];
  int sign = sort_sign(indices.data(), f.degree, sorted);
  if (sign == 0) return 0.0;
  return sign * f.coeffs(cmb.rank(sorted));
}

InvariantComplex::InvariantComplex(const ReductiveSplit& split)
    : split_(&split) {
  const int m = split.p_dim();
  for (int a = 0; a < split.k_dim(); ++a) isotropy_.push_back(split.isotropy(a));
  pair_index_.assign(m * m, -1);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) pair_index_[i * m + j] = split.pair_index(i, j);
}

const Combinadic& InvariantComplex::tuples(int k) {
  auto it = tuples_.find(k);
  if (it == tuples_.end())
    it = tuples_.emplace(k, Combinadic(split_->p_dim(), k)).first;
  return it->second;
}

const Eigen::MatrixXd& InvariantComplex::basis(int k) {
  auto it = basis_.find(k);
  if (it != basis_.end()) return it->second;
  const int m = split_->p_dim();
  if (k < 0 || k > m)
    throw std::invalid_argument("invariant_basis: need 0 <= k <= dim p");
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  const Combinadic& cmb = tuples(k);
  Eigen::MatrixXd phi;
  if (isotropy_.empty() || k == 0) {
    phi = Eigen::MatrixXd::Identity(cmb.count(), cmb.count()) / std::sqrt(kfact);
  } else {
    // invariance is block-multidegree-diagonal, so solve per signature group
    std::map<std::vector<int>, std::vector<int>> groups;
    const auto& blocks = split_->blocks();
    for (int r = 0; r < cmb.count(); ++r) {
      std::vector<int> sig(blocks.size(), 0);
      for (int v : cmb.tuple(r)) ++sig[split_->block_of(v)];
      groups[sig].push_back(r);
    }
    std::vector<Eigen::MatrixXd> pieces;
    int total = 0;
    for (const auto& [sig, rows] : groups) {
      Eigen::MatrixXd stack = kernels::lie_derivative_stack(cmb, rows, isotropy_);
      Eigen::MatrixXd local = nullspace(stack, tol::kernel);
      if (local.cols() == 0) continue;
      Eigen::MatrixXd scattered = Eigen::MatrixXd::Zero(cmb.count(), local.cols());
      for (size_t i = 0; i < rows.size(); ++i)
        scattered.row(rows[i]) = local.row(static_cast<int>(i));
      pieces.push_back(std::move(scattered));
      total += static_cast<int>(pieces.back().cols());
    }
    phi.resize(cmb.count(), total);
    int at = 0;
    for (const auto& piece : pieces) {
      phi.middleCols(at, piece.cols()) = piece;
      at += static_cast<int>(piece.cols());
    }
    phi /= std::sqrt(kfact);
  }
  it = basis_.emplace(k, std::move(phi)).first;
  return it->second;
}

Eigen::MatrixXd InvariantComplex::d(int k, const Eigen::MatrixXd& coords) {
  if (k >= split_->p_dim())  // top degree: nothing above
    return Eigen::MatrixXd::Zero(0, coords.cols());
  const Combinadic& from = tuples(k);
  const Combinadic& to = tuples(k + 1);
  if (coords.rows() != from.count())
    throw std::invalid_argument("d: coefficient length mismatch");
  return kernels::differential_batch(from, to, split_->pair_p_matrix(),
                                     pair_index_, coords);
}

const Eigen::MatrixXd& InvariantComplex::d_basis(int k) {
  auto it = d_basis_.find(k);
  if (it == d_basis_.end()) it = d_basis_.emplace(k, d(k, basis(k))).first;
  return it->second;
}

Eigen::VectorXd InvariantComplex::weights(const MetricSpec& m) const {
  if (m.x.size() != static_cast<int>(split_->blocks().size()))
    throw std::invalid_argument("MetricSpec: one scaling per block required");
  if (m.x.minCoeff() <= 0.0)
    throw std::invalid_argument("MetricSpec: scalings must be positive");
  if (m.z.size() != 0) {
    if (m.z.size() != split_->z().size() ||
        (m.z - split_->z()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("MetricSpec: z does not match the split");
  }
  Eigen::VectorXd w(split_->p_dim());
  for (int i = 0; i < w.size(); ++i) w(i) = m.x(split_->block_of(i));
  return w;
}

Eigen::MatrixXd InvariantComplex::gram(int k, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd& phi = basis(k);
  Eigen::VectorXd tw = kernels::tuple_weights(tuples(k), w);
  return phi.transpose() * tw.asDiagonal() * phi;
}

Eigen::MatrixXd InvariantComplex::laplacian(int k, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd& phi = basis(k);
  const int n = static_cast<int>(phi.cols());
  if (n == 0) return Eigen::MatrixXd::Zero(0, 0);
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(n, n);
  if (k < split_->p_dim()) {
    const Eigen::MatrixXd& dk = d_basis(k);
    Eigen::VectorXd twu = kernels::tuple_weights(tuples(k + 1), w);
    quad += dk.transpose() * twu.asDiagonal() * dk;
  }
  if (k > 0 && basis(k - 1).cols() > 0) {
    Eigen::VectorXd tw = kernels::tuple_weights(tuples(k), w);
    Eigen::MatrixXd e = d_basis(k - 1).transpose() * tw.asDiagonal() * phi;
    Eigen::MatrixXd glow = gram(k - 1, w);
    quad += e.transpose() * glow.ldlt().solve(e);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram(k, w));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("laplacian: metric gram not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd sym = l.triangularView<Eigen::Lower>().solve(quad);
  sym = l.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(sym.transpose()));
  return 0.5 * (sym + sym.transpose());
}

int InvariantComplex::betti(int k, const Eigen::VectorXd& w) {
  Eigen::MatrixXd lap = laplacian(k, w);
  if (lap.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  const auto& ev = eig.eigenvalues();
  double cut = tol::kernel * std::max(1.0, std::abs(ev(ev.size() - 1)));
  int dim = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) <= cut) ++dim;
  return dim;
}

Eigen::VectorXd InvariantComplex::to_basis(int k, const Eigen::VectorXd& coords) {
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;
  return kfact * (basis(k).transpose() * coords);
}

Eigen::VectorXd InvariantComplex::codifferential(int k, const Eigen::VectorXd& w,
                                                 const Eigen::VectorXd& coords) {
  if (k == 0) return Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd& psi = basis(k - 1);
  if (psi.cols() == 0) return Eigen::VectorXd::Zero(tuples(k - 1).count());
  Eigen::VectorXd tw = kernels::tuple_weights(tuples(k), w);
  Eigen::VectorXd rhs = d_basis(k - 1).transpose() * (tw.asDiagonal() * coords);
  Eigen::VectorXd s = gram(k - 1, w).ldlt().solve(rhs);
  return psi * s;
}

double InvariantComplex::harmonic_residual(int k, const Eigen::VectorXd& w,
                                           const Eigen::VectorXd& coords) {
  double out = 0.0;
  if (k < split_->p_dim()) {
    Eigen::VectorXd dc = d(k, coords);
    Eigen::VectorXd twu = kernels::tuple_weights(tuples(k + 1), w);
    out += std::sqrt(std::max(0.0, dc.dot(twu.asDiagonal() * dc)));
  }
  if (k > 0 && basis(k - 1).cols() > 0) {
    Eigen::VectorXd tw = kernels::tuple_weights(tuples(k), w);
    Eigen::VectorXd rhs = d_basis(k - 1).transpose() * (tw.asDiagonal() * coords);
    Eigen::VectorXd s = gram(k - 1, w).ldlt().solve(rhs);
    out += std::sqrt(std::max(0.0, rhs.dot(s)));
  }
  return out;
}

double InvariantComplex::invariance_residual(int k, const Eigen::VectorXd& coords) {
  if (isotropy_.empty() || k == 0) return 0.0;
  const Combinadic& cmb = tuples(k);
  std::vector<int> rows(cmb.count());
  for (int i = 0; i < cmb.count(); ++i) rows[i] = i;
  Eigen::MatrixXd stack = kernels::lie_derivative_stack(cmb, rows, isotropy_);
  return (stack * coords).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd invariant_basis(const ReductiveSplit& split, int k) {
  InvariantComplex cx(split);
  return cx.basis(k);
}

InvariantForm differential(const ReductiveSplit& split, const InvariantForm& f) {
  InvariantComplex cx(split);
  return {f.degree + 1, Eigen::VectorXd(cx.d(f.degree, f.coeffs))};
}

Eigen::MatrixXd form_gram(const ReductiveSplit& split, const MetricSpec& m,
                          int k) {
  InvariantComplex cx(split);
  return cx.gram(k, cx.weights(m));
}

InvariantForm codifferential(const ReductiveSplit& split, const MetricSpec& m,
                             const InvariantForm& f) {
  InvariantComplex cx(split);
  return {f.degree - 1,
          Eigen::VectorXd(cx.codifferential(f.degree, cx.weights(m), f.coeffs))};
}

Eigen::MatrixXd laplacian(const ReductiveSplit& split, const MetricSpec& m,
                          int k) {
  InvariantComplex cx(split);
  return cx.laplacian(k, cx.weights(m));
}

int betti(const ReductiveSplit& split, const MetricSpec& m, int k) {
  InvariantComplex cx(split);
  return cx.betti(k, cx.weights(m));
}

double harmonic_residual(const ReductiveSplit& split, const MetricSpec& m,
                         const InvariantForm& f) {
  InvariantComplex cx(split);
  return cx.harmonic_residual(f.degree, cx.weights(m), f.coeffs);
}

Eigen::MatrixXd trivial_isotypic(const ReductiveSplit& split) {
  const int m = split.p_dim();
  const int dk = split.k_dim();
  if (dk == 0) return Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd stack(dk * m, m);
  for (int a = 0; a < dk; ++a) stack.middleRows(a * m, m) = split.isotropy(a);
  return nullspace(stack, tol::kernel);
}

InvariantForm theta_form(const ReductiveSplit& split, const Eigen::VectorXd& x) {
  const int m = split.p_dim();
  InvariantForm f{1, Eigen::VectorXd(m)};
  for (int i = 0; i < m; ++i)
    f.coeffs(i) = split.p_basis().col(i).dot(split.gb() * x);
  return f;
}

InvariantForm omega_form(const ReductiveSplit& split, const Eigen::VectorXd& x) {
  const int m = split.p_dim();
  Combinadic pairs(m, 2);
  InvariantForm f{2, Eigen::VectorXd(pairs.count())};
  Eigen::VectorXd gx = split.gb() * x;
  for (int r = 0; r < pairs.count(); ++r) {
    const auto& t = pairs.tuple(r);
    f.coeffs(r) = gx.dot(split.bracket_full(t[0], t[1]));
  }
  return f;
}

InvariantForm harmonic_2form_correction(const ReductiveSplit& split,
                                        const Eigen::VectorXd& z_center) {
  Eigen::MatrixXd p0 = trivial_isotypic(split);
  if (p0.cols() == 0) return omega_form(split, z_center);
  Eigen::MatrixXd v = split.p_basis() * p0;  // ambient columns spanning p_0
  const Eigen::MatrixXd& kappa = killing_form(split.algebra()).matrix;
  Eigen::MatrixXd a = v.transpose() * kappa * v;
  Eigen::VectorXd rhs = -(v.transpose() * kappa * z_center);
  Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(-a));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "harmonic_2form_correction: kappa gram on p_0 is singular");
  Eigen::VectorXd s = -llt.solve(rhs);
  return omega_form(split, z_center + v * s);
}

}  // namespace harmform
