#pragma once

#include <map>

#include "harmform/combinatorics.hpp"
#include "harmform/split.hpp"

namespace harmform {

// Diagonal invariant metric g = (x_1,...,x_r)_{g_b}: one positive scaling per
// block of the split.  z is carried along for reporting; it must match the
// split it is used with.
struct MetricSpec {
  Eigen::VectorXd z;
  Eigen::VectorXd x;

  static MetricSpec normal(const ReductiveSplit& split);  // x = (1,...,1)
};

// K-invariant alternating form: coefficients over strictly increasing index
// tuples of the split's orthonormal basis, colex-ranked.
struct InvariantForm {
  int degree = 0;
  Eigen::VectorXd coeffs;
};

// Value at an arbitrary index tuple (sorting sign applied, 0 on repeats).
double form_value(const Combinadic& cmb, const InvariantForm& f,
                  const std::vector<int>& indices);

// Calculus on the invariant complex of one split, with cached invariant
// bases and differentials.  Metrics vary per call, so a single complex
// serves a whole metric sweep.
class InvariantComplex {
 public:
  explicit InvariantComplex(const ReductiveSplit& split);

  const ReductiveSplit& split() const { return *split_; }
  const Combinadic& tuples(int k);

  // g_b-orthonormal basis of (Lambda^k p^*)^K as coefficient columns.
  const Eigen::MatrixXd& basis(int k);
  int invariant_dim(int k) { return static_cast<int>(basis(k).cols()); }

  // Differential on raw coefficient columns (degree k -> k+1).
  Eigen::MatrixXd d(int k, const Eigen::MatrixXd& coords);
  const Eigen::MatrixXd& d_basis(int k);  // d of basis(k), cached

  // Per-basis-vector weights of a block metric.
  Eigen::VectorXd weights(const MetricSpec& m) const;

  Eigen::MatrixXd gram(int k, const Eigen::VectorXd& w);
  // Symmetric PSD matrix of dd* + d*d in a g-orthonormalized invariant basis.
  Eigen::MatrixXd laplacian(int k, const Eigen::VectorXd& w);
  int betti(int k, const Eigen::VectorXd& w);

  // Expansion coefficients of an invariant coordinate vector in basis(k).
  Eigen::VectorXd to_basis(int k, const Eigen::VectorXd& coords);
  // d* as raw degree-(k-1) coefficients.
  Eigen::VectorXd codifferential(int k, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& coords);
  // |d a|_g + |d*_g a|_g
  double harmonic_residual(int k, const Eigen::VectorXd& w,
                           const Eigen::VectorXd& coords);

  double invariance_residual(int k, const Eigen::VectorXd& coords);

 private:
  const ReductiveSplit* split_;
  std::vector<Eigen::MatrixXd> isotropy_;
  std::vector<int> pair_index_;
  std::map<int, Combinadic> tuples_;
  std::map<int, Eigen::MatrixXd> basis_;
  std::map<int, Eigen::MatrixXd> d_basis_;
};

// Free-standing operations (convenience wrappers over InvariantComplex).
Eigen::MatrixXd invariant_basis(const ReductiveSplit& split, int k);
InvariantForm differential(const ReductiveSplit& split, const InvariantForm& f);
Eigen::MatrixXd form_gram(const ReductiveSplit& split, const MetricSpec& m,
                          int k);
InvariantForm codifferential(const ReductiveSplit& split, const MetricSpec& m,
                             const InvariantForm& f);
Eigen::MatrixXd laplacian(const ReductiveSplit& split, const MetricSpec& m,
                          int k);
int betti(const ReductiveSplit& split, const MetricSpec& m, int k);
double harmonic_residual(const ReductiveSplit& split, const MetricSpec& m,
                         const InvariantForm& f);

// Basis of p_0 = {X in p : [k, X] = 0}, in p coordinates.
Eigen::MatrixXd trivial_isotypic(const ReductiveSplit& split);

// theta_X = g_b(. , X) and omega_X = g_b([.,.], X), X in ambient coords.
InvariantForm theta_form(const ReductiveSplit& split, const Eigen::VectorXd& x);
InvariantForm omega_form(const ReductiveSplit& split, const Eigen::VectorXd& x);

// Harmonic representative omega_{Z + X_Z} of [omega_Z] for Z in z(k):
// X_Z in p_0 solves kappa(X, X_Z) = -kappa(X, Z) on p_0.
InvariantForm harmonic_2form_correction(const ReductiveSplit& split,
                                        const Eigen::VectorXd& z_center);

}  // namespace harmform
