#pragma once

#include "harmform/exterior.hpp"

namespace harmform {

// Bi-invariant symmetric form Q = y_1 kappa_{g_1} + ... + y_s kappa_{g_s}.
struct BiInvariantQ {
  Eigen::VectorXd y;
  Eigen::MatrixXd matrix;          // induced form on g, ambient coordinates
  bool admissible = false;         // Q|_{k x k} = 0
  double kernel_distance = 0.0;    // distance of y from the admissible space
  double restriction_norm = 0.0;   // max |Q| on k x k
};
BiInvariantQ make_q(const Embedding& e, const Eigen::VectorXd& y);

// Q([.,.],.) in the split basis: the Cartan 3-form for a Lie-group split,
// the g_b-coclosed companion form on a proper G/K split.
InvariantForm cartan_form(const ReductiveSplit& split, const BiInvariantQ& q);

// The canonical closed 3-form attached to an admissible Q, together with the
// primitive alpha_Q certifying the pullback identity.
struct HqData {
  InvariantForm h;                // degree 3 on p
  Eigen::MatrixXd alpha;          // alpha_Q on g, ambient antisymmetric matrix
  double form_agreement = 0.0;    // gap between the two defining expressions
  double pullback_residual = 0.0; // worst violation of pi^*H = Qbar + d alpha
};
HqData h_q(const ReductiveSplit& split, const BiInvariantQ& q);

// H_Q alone (cheaper; no certificates).
InvariantForm h_q_form(const ReductiveSplit& split, const BiInvariantQ& q);

// Closed-form codifferential of a 3-form on a Lie group for the diagonal
// metric g = (x_1,...,x_n)_{g_b}; per-basis-vector x.
InvariantForm dgstar_formula(const ReductiveSplit& group,
                             const Eigen::VectorXd& x, const InvariantForm& beta);

// Harmonicity of Qbar (+ d alpha) on a Lie group for a diagonal metric: the
// pair conditions in the structure constants.
struct GroupHarmonicity {
  bool harmonic = true;
  double max_residual = 0.0;
  Eigen::MatrixXd pair_residual;  // n x n, upper triangle
};
GroupHarmonicity group_harmonicity(const ReductiveSplit& group,
                                   const Eigen::VectorXd& x,
                                   const BiInvariantQ& q,
                                   const InvariantForm* alpha = nullptr);

// Coefficient t making Hkappa + t d(e1^e2) harmonic on SU(3) for a diagonal
// metric in the torus-adapted basis.
double su3_correction(const Eigen::VectorXd& x);

struct CasimirData {
  double cas0 = 0.0;          // trace of the adjoint Casimir of k
  Eigen::VectorXd cas;        // traces on the isotropy blocks p_1..p_s
  double identity_residual = 0.0;  // max_i |cas_i + cas0 - dim k / c_i|
};
CasimirData casimir_data(const ReductiveSplit& split);

// The closed-form harmonicity criterion for H_Q on an aligned split under a
// block-diagonal metric.
struct HarmonicityCheck {
  bool holds = true;
  double max_residual = 0.0;      // normalized; holds iff <= 1e-8
  Eigen::VectorXd coeff_a, coeff_b;  // a_j, b_j (nonnegative)
  Eigen::VectorXd tail;              // A_j
  Eigen::VectorXd qsum;              // C_j
  Eigen::MatrixXd residual;          // (s-1)x(s-1), pairs j < k
};
HarmonicityCheck theorem_check(const ReductiveSplit& split,
                               const MetricSpec& metric, const BiInvariantQ& q,
                               const AssumptionReport& assumptions);

// Closed-form pairing of H_Q against the skew invariant 2-form witnesses
// on the eta blocks; H_Q is g-harmonic iff every entry vanishes.
Eigen::MatrixXd harmonic_pairing(const ReductiveSplit& split,
                                 const MetricSpec& metric,
                                 const BiInvariantQ& q);

// For a non-standard normal metric: the unique admissible direction y whose
// H_Q is g_b-harmonic, normalized to |y| = 1 with positive leading entry.
BiInvariantQ unique_harmonic_q(const ReductiveSplit& split);

enum class FamilyMode { AbelianK, NonabelianK, LedgerObata, NormalForQ };

struct FamilyParams {
  double x1 = 1.0;     // abelian / nonabelian modes
  double xs = 1.0;     // nonabelian mode
  double xs1 = 1.0;    // nonabelian mode
  double f1 = 0.0;     // normal-for-Q mode: common value of f_i
  Eigen::VectorXd y;   // normal-for-Q mode
};

struct MetricFamily {
  bool feasible = true;
  std::string note;
  MetricSpec metric;           // representative member (when applicable)
  double t = 0.0;              // ledger-obata last-block scale
  double threshold_u = 0.0;    // nonabelian: lower bound on x_{s+1}
  double threshold_v = 0.0;    // nonabelian: lower bound on x_s
  Eigen::VectorXd z_out;       // normal-for-Q: the produced bi-invariant z
};
MetricFamily special_families(const ReductiveSplit& split, FamilyMode mode,
                              const FamilyParams& params);

}  // namespace harmform
