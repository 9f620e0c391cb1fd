#include "harmform/linalg.hpp"

#include <stdexcept>

namespace harmform {

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double tau) {
  if (a.rows() == 0)  // no constraints: the whole space
    return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cut = tau * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

Eigen::MatrixXd sym_kernel(const Eigen::MatrixXd& s, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  const auto& ev = eig.eigenvalues();
  double vmax = ev.size() ? std::abs(ev(ev.size() - 1)) : 0.0;
  double cut = tau * std::max(1.0, vmax);
  int nz = 0;  // eigenvalues are ascending; kernel sits at the front for PSD s
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) <= cut) ++nz;
  return eig.eigenvectors().leftCols(nz);
}

int numeric_rank(const Eigen::MatrixXd& a, double tau) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  double cut = tau * std::max(1.0, sv(0));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  return rank;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& basis,
                               const Eigen::MatrixXd& gram) {
  if (basis.cols() == 0) return basis;
  Eigen::MatrixXd g = basis.transpose() * gram * basis;
  double off = (g - Eigen::MatrixXd(g.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
  if (off <= 1e-12 * std::max(1.0, g.diagonal().cwiseAbs().maxCoeff())) {
    Eigen::MatrixXd out = basis;
    for (int j = 0; j < out.cols(); ++j) {
      double d = g(j, j);
      if (d <= 0.0) throw std::runtime_error("orthonormalize: gram not positive");
      out.col(j) /= std::sqrt(d);
    }
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("orthonormalize: gram not positive definite");
  // basis * L^{-T} has gram identity
  return llt.matrixL().transpose().solve<Eigen::OnTheRight>(basis);
}

double projector_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                          const Eigen::MatrixXd& gram) {
  Eigen::MatrixXd pu = u * u.transpose() * gram;
  Eigen::MatrixXd pv = v * v.transpose() * gram;
  return (pu - pv).cwiseAbs().maxCoeff();
}

}  // namespace harmform
