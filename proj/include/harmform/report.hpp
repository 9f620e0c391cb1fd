#pragma once

#include <cstdint>
#include <optional>

#include "harmform/cartan.hpp"
#include "harmform/space_spec.hpp"

namespace harmform {

struct AnalyzeOptions {
  std::uint64_t seed = 1;
  int trials = 0;  // sampled (x, y) pairs beyond the spec-given one
  enum class Oracle { On, Off, Sample } oracle = Oracle::On;
  int oracle_stride = 5;  // with Sample, check every n-th verdict
  bool timings = false;
};

struct PairVerdict {
  int trial = -1;  // -1 = the spec-given pair
  Eigen::VectorXd x, y;
  bool closed_holds = false;
  double closed_residual = 0.0;
  bool oracle_checked = false;
  bool oracle_holds = false;
  double oracle_residual = -1.0;
  bool agree = true;
};

struct Report {
  std::string space;
  std::uint64_t seed = 0;
  int schema_version = 1;
  // structure
  int s = 0, t = 0, d0 = 0;
  int dim_g = 0, dim_k = 0, dim_p = 0;
  bool lie_group = false;
  bool aligned = false;
  std::string alignment_note;
  Eigen::VectorXd align_c, align_lambda;
  Eigen::VectorXd z;
  // betti numbers, formula vs oracle
  int b1_formula = 0, b2_formula = 0, b3_formula = 0;
  int b1_oracle = -1, b2_oracle = -1, b3_oracle = -1;
  bool betti_metric_independent = true;
  // casimir invariants (aligned case)
  bool has_casimir = false;
  double cas0 = 0.0;
  Eigen::VectorXd cas;
  double cas_identity_residual = 0.0;
  bool assumptions_ok = false;
  std::string assumption_note;
  // invariant-metric moduli: full dimension vs the slice covered by the
  // block-diagonal families (one scaling per block plus the s bi-invariant
  // coefficients)
  int metric_moduli_dim = -1;
  int covered_metric_dim = -1;
  // harmonicity verdicts
  std::vector<PairVerdict> verdicts;
  int disagreements = 0;
  bool failed = false;  // any closed/oracle disagreement
  double seconds = 0.0;
  bool show_timings = false;
};

Report analyze(const SpaceSpec& spec, const AnalyzeOptions& options);

// Randomized closed-form vs oracle cross-check; returns 0 on agreement, 1 on
// the first disagreement (writing a reproduction bundle to bundle_path).
// `inject_bug` feeds the closed-form side a stale metric, a deliberate
// negative control for the harness itself.
int verify(const SpaceSpec& spec, int trials, std::uint64_t seed,
           bool inject_bug, const std::string& bundle_path,
           std::string* message = nullptr);

enum class ReportFormat { Json, Csv, Table };
std::string report_emit(const Report& report, ReportFormat format);

}  // namespace harmform
