#include "harmform/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "harmform/linalg.hpp"
#include "harmform/rng.hpp"
#include "harmform/tolerances.hpp"

namespace harmform {

namespace {

using json = nlohmann::json;

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json vec_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(fmt12(v(i)));
  return arr;
}

Eigen::VectorXd random_metric_x(int blocks, SplitMix64& rng) {
  Eigen::VectorXd x(blocks);
  for (int i = 0; i < blocks; ++i) x(i) = rng.uniform(0.6, 1.8);
  return x;
}

Eigen::VectorXd random_admissible(const ThirdCohomology& h3, SplitMix64& rng) {
  Eigen::VectorXd c(h3.b3);
  for (int i = 0; i < c.size(); ++i) c(i) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd y = h3.kernel * c;
  double n = y.norm();
  return n > 1e-12 ? Eigen::VectorXd(y / n) : y;
}

}  // namespace

Report analyze(const SpaceSpec& spec, const AnalyzeOptions& options) {
  auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.space = spec.name;
  rep.seed = options.seed;
  rep.show_timings = options.timings;

  BuiltSpace bs = build_space(spec);
  const Embedding& e = *bs.embedding;
  rep.s = e.s();
  rep.t = e.t();
  rep.d0 = e.center_dim();
  rep.dim_g = e.ambient().dim();
  rep.dim_k = e.sub_dim();
  rep.dim_p = rep.dim_g - rep.dim_k;
  rep.lie_group = rep.dim_k == 0;
  rep.z = bs.z;

  ThirdCohomology h3 = b3_dimension(e);
  rep.b1_formula = 0;  // semisimple ambient algebra
  rep.b2_formula = rep.d0;
  rep.b3_formula = h3.b3;

  AlignmentData align;
  std::optional<ReductiveSplit> split;
  if (rep.lie_group) {
    rep.alignment_note = "trivial isotropy: Lie-group case";
    split = lie_group_split(bs.g, bs.z);
  } else {
    align = alignment_check(e);
    rep.aligned = align.is_aligned;
    rep.alignment_note = align.diagnostics;
    if (align.is_aligned) {
      rep.align_c = align.c;
      rep.align_lambda = align.lambda;
      split = aligned_split(bs.embedding, align, bs.z);
    } else {
      split = generic_split(bs.embedding, bs.z);
    }
  }

  InvariantComplex cx(*split);
  SplitMix64 rng(options.seed);
  const int blocks = static_cast<int>(split->blocks().size());
  MetricSpec base = MetricSpec::normal(*split);
  if (spec.x.size()) {
    if (spec.x.size() != blocks)
      throw std::invalid_argument("x must hold one scaling per block (" +
                                  std::to_string(blocks) + ")");
    base.x = spec.x;
  }

  if (options.oracle != AnalyzeOptions::Oracle::Off) {
    Eigen::VectorXd w = cx.weights(MetricSpec::normal(*split));
    rep.b1_oracle = cx.betti(1, w);
    rep.b2_oracle = cx.betti(2, w);
    rep.b3_oracle = cx.betti(3, w);
    Eigen::VectorXd w2 = cx.weights(base);
    MetricSpec probe = base;
    if ((w2 - w).cwiseAbs().maxCoeff() < 1e-12) {
      probe.x = random_metric_x(blocks, rng);
      w2 = cx.weights(probe);
    }
    rep.betti_metric_independent = cx.betti(2, w2) == rep.b2_oracle &&
                                   cx.betti(3, w2) == rep.b3_oracle;
  }

  // harmonicity matrix
  AssumptionReport assume;
  if (rep.aligned) {
    assume = assumption_check(*split);
    rep.assumptions_ok = assume.ok();
    rep.assumption_note = assume.summary();
    CasimirData cas = casimir_data(*split);
    rep.has_casimir = true;
    rep.cas0 = cas.cas0;
    rep.cas = cas.cas;
    rep.cas_identity_residual = cas.identity_residual;
    // dimension of the space of invariant metrics (symmetric intertwiners of
    // the isotropy action) against the slice the block families reach
    {
      const int m = split->p_dim();
      const int dk = split->k_dim();
      const int nsym = m * (m + 1) / 2;
      Eigen::MatrixXd sys(dk * m * m, nsym);
      int col = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j, ++col) {
          Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, m);
          basis(i, j) = basis(j, i) = 1.0;
          for (int a = 0; a < dk; ++a) {
            Eigen::MatrixXd comm =
                split->isotropy(a) * basis - basis * split->isotropy(a);
            sys.block(a * m * m, col, m * m, 1) =
                Eigen::Map<Eigen::VectorXd>(comm.data(), m * m);
          }
        }
      rep.metric_moduli_dim =
          static_cast<int>(nullspace(sys, tol::kernel).cols());
      rep.covered_metric_dim = 3 * rep.s - 2;
    }
  }

  auto oracle_due = [&](int index) {
    switch (options.oracle) {
      case AnalyzeOptions::Oracle::Off:
        return false;
      case AnalyzeOptions::Oracle::On:
        return true;
      case AnalyzeOptions::Oracle::Sample:
        return index % std::max(1, options.oracle_stride) == 0;
    }
    return true;
  };

  auto run_pair = [&](int trial, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y) {
    PairVerdict v;
    v.trial = trial;
    v.x = x;
    v.y = y;
    MetricSpec m = base;
    m.x = x;
    if (rep.lie_group) {
      BiInvariantQ q = make_q(e, y);
      GroupHarmonicity gh = group_harmonicity(*split, x, q);
      v.closed_holds = gh.harmonic;
      v.closed_residual = gh.max_residual;
      if (oracle_due(trial + 1)) {
        InvariantForm qbar = cartan_form(*split, q);
        v.oracle_residual =
            cx.harmonic_residual(3, cx.weights(m), qbar.coeffs);
        v.oracle_holds = v.oracle_residual <= tol::harmonic;
        v.oracle_checked = true;
      }
    } else {
      BiInvariantQ q = make_q(e, y);
      if (!q.admissible || !rep.assumptions_ok) return;
      HarmonicityCheck hc = theorem_check(*split, m, q, assume);
      v.closed_holds = hc.holds;
      v.closed_residual = hc.max_residual;
      if (oracle_due(trial + 1)) {
        InvariantForm h = h_q_form(*split, q);
        v.oracle_residual = cx.harmonic_residual(3, cx.weights(m), h.coeffs);
        v.oracle_holds = v.oracle_residual <= tol::harmonic;
        v.oracle_checked = true;
      }
    }
    if (v.oracle_checked) {
      v.agree = v.closed_holds == v.oracle_holds;
      if (!v.agree) {
        ++rep.disagreements;
        rep.failed = true;
      }
    }
    rep.verdicts.push_back(std::move(v));
  };

  const bool can_check = rep.lie_group || (rep.aligned && rep.assumptions_ok);
  if (can_check && h3.b3 > 0) {
    Eigen::VectorXd y0 = spec.y.size() ? spec.y : Eigen::VectorXd(h3.kernel.col(0));
    run_pair(-1, base.x, y0);
    for (int trial = 0; trial < options.trials; ++trial) {
      SplitMix64 stream = SplitMix64::stream(options.seed, trial);
      run_pair(trial, random_metric_x(blocks, stream),
               random_admissible(h3, stream));
    }
  }

  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rep;
}

int verify(const SpaceSpec& spec, int trials, std::uint64_t seed,
           bool inject_bug, const std::string& bundle_path,
           std::string* message) {
  BuiltSpace bs = build_space(spec);
  const Embedding& e = *bs.embedding;
  if (e.sub_dim() == 0)
    throw std::invalid_argument("verify: needs a nontrivial isotropy group");
  AlignmentData align = alignment_check(e);
  if (!align.is_aligned)
    throw std::invalid_argument("verify: space is not aligned: " +
                                align.diagnostics);
  ReductiveSplit split = aligned_split(bs.embedding, align, bs.z);
  AssumptionReport assume = assumption_check(split);
  if (!assume.ok())
    throw std::invalid_argument("verify: criterion not applicable: " +
                                assume.summary());
  InvariantComplex cx(split);
  ThirdCohomology h3 = b3_dimension(e);
  if (h3.b3 == 0) throw std::invalid_argument("verify: no admissible forms");
  const int blocks = static_cast<int>(split.blocks().size());

  for (int trial = 0; trial <= trials; ++trial) {
    SplitMix64 stream = SplitMix64::stream(seed, trial);
    MetricSpec m = MetricSpec::normal(split);
    Eigen::VectorXd y;
    if (trial == 0) {
      y = h3.kernel.col(0);  // a guaranteed harmonic pair at the normal metric
    } else {
      m.x = random_metric_x(blocks, stream);
      y = random_admissible(h3, stream);
    }
    BiInvariantQ q = make_q(e, y);
    MetricSpec closed_m = m;
    if (inject_bug)  // negative control: the closed-form side sees a stale x
      closed_m.x(blocks - 1) *= 1.2;
    HarmonicityCheck hc = theorem_check(split, closed_m, q, assume);
    InvariantForm h = h_q_form(split, q);
    double resid = cx.harmonic_residual(3, cx.weights(m), h.coeffs);
    bool oracle_holds = resid <= tol::harmonic;
    if (hc.holds != oracle_holds) {
      json bundle;
      bundle["space"] = json::parse(spec_to_json(spec));
      bundle["seed"] = seed;
      bundle["trial"] = trial;
      bundle["x"] = vec_json(m.x);
      bundle["y"] = vec_json(y);
      bundle["closed_holds"] = hc.holds;
      bundle["closed_residual"] = hc.max_residual;
      bundle["oracle_residual"] = resid;
      bundle["injected_bug"] = inject_bug;
      std::ofstream out(bundle_path);
      out << bundle.dump(2) << "\n";
      if (message)
        *message = "disagreement at trial " + std::to_string(trial) +
                   "; reproduction bundle written to " + bundle_path;
      return 1;
    }
  }
  if (message)
    *message = "agreement on " + std::to_string(trials + 1) + " trials";
  return 0;
}

namespace {

json report_json_value(const Report& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["space"] = r.space;
  j["seed"] = r.seed;
  j["dimensions"] = {{"s", r.s},       {"t", r.t},
                     {"z_center", r.d0}, {"dim_g", r.dim_g},
                     {"dim_k", r.dim_k}, {"dim_p", r.dim_p}};
  j["lie_group"] = r.lie_group;
  j["aligned"] = r.aligned;
  j["alignment_note"] = r.alignment_note;
  if (r.align_c.size()) j["alignment_c"] = vec_json(r.align_c);
  if (r.align_lambda.size()) j["alignment_lambda"] = vec_json(r.align_lambda);
  j["z"] = vec_json(r.z);
  j["betti"] = {
      {"formula", {r.b1_formula, r.b2_formula, r.b3_formula}},
      {"oracle", {r.b1_oracle, r.b2_oracle, r.b3_oracle}},
      {"metric_independent", r.betti_metric_independent},
  };
  if (r.has_casimir) {
    j["casimir"] = {{"cas0", fmt12(r.cas0)},
                    {"cas", vec_json(r.cas)},
                    {"identity_residual", fmt12(r.cas_identity_residual)}};
    j["assumptions_ok"] = r.assumptions_ok;
    j["assumption_note"] = r.assumption_note;
    j["metric_moduli_dim"] = r.metric_moduli_dim;
    j["covered_metric_dim"] = r.covered_metric_dim;
  }
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json jv;
    jv["trial"] = v.trial;
    jv["x"] = vec_json(v.x);
    jv["y"] = vec_json(v.y);
    jv["closed_holds"] = v.closed_holds;
    jv["closed_residual"] = fmt12(v.closed_residual);
    if (v.oracle_checked) {
      jv["oracle_holds"] = v.oracle_holds;
      jv["oracle_residual"] = fmt12(v.oracle_residual);
      jv["agree"] = v.agree;
    }
    verdicts.push_back(jv);
  }
  j["verdicts"] = verdicts;
  j["disagreements"] = r.disagreements;
  j["failed"] = r.failed;
  if (r.show_timings) j["seconds"] = r.seconds;
  return j;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ",";
    out += c;
    first = false;
  }
  out += "\n";
  return out;
}

std::string vec_compact(const Eigen::VectorXd& v) {
  std::string out = "(";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += " ";
    out += fmt12(v(i));
  }
  return out + ")";
}

}  // namespace

std::string report_emit(const Report& r, ReportFormat format) {
  if (format == ReportFormat::Json) return report_json_value(r).dump(2) + "\n";
  if (format == ReportFormat::Csv) {
    std::string out = csv_row({"trial", "x", "y", "closed_holds",
                               "closed_residual", "oracle_holds",
                               "oracle_residual", "agree"});
    for (const auto& v : r.verdicts)
      out += csv_row({std::to_string(v.trial), vec_compact(v.x),
                      vec_compact(v.y), v.closed_holds ? "1" : "0",
                      fmt12(v.closed_residual),
                      v.oracle_checked ? (v.oracle_holds ? "1" : "0") : "",
                      v.oracle_checked ? fmt12(v.oracle_residual) : "",
                      v.oracle_checked ? (v.agree ? "1" : "0") : ""});
    return out;
  }
  // text table
  std::ostringstream out;
  out << "space: " << r.space << "  (seed " << r.seed << ")\n";
  out << "dims: g=" << r.dim_g << " k=" << r.dim_k << " p=" << r.dim_p
      << "  s=" << r.s << " t=" << r.t << " z(k)=" << r.d0 << "\n";
  out << "case: " << (r.lie_group ? "lie-group" : r.aligned ? "aligned" : "generic")
      << "  [" << r.alignment_note << "]\n";
  if (r.align_c.size()) out << "c = " << vec_compact(r.align_c)
                            << "  lambda = " << vec_compact(r.align_lambda) << "\n";
  out << "z = " << vec_compact(r.z) << "\n";
  out << "betti formula (b1,b2,b3) = (" << r.b1_formula << "," << r.b2_formula
      << "," << r.b3_formula << ")";
  if (r.b1_oracle >= 0)
    out << "  oracle = (" << r.b1_oracle << "," << r.b2_oracle << ","
        << r.b3_oracle << ")"
        << (r.betti_metric_independent ? "" : "  METRIC-DEPENDENT");
  out << "\n";
  if (r.has_casimir) {
    out << "casimir: cas0 = " << fmt12(r.cas0) << "  cas = " << vec_compact(r.cas)
        << "  identity residual = " << fmt12(r.cas_identity_residual) << "\n";
    out << "criterion applicable: " << (r.assumptions_ok ? "yes" : "no") << " ("
        << r.assumption_note << ")\n";
    out << "invariant metrics: moduli dim " << r.metric_moduli_dim
        << ", block families cover " << r.covered_metric_dim << "\n";
  }
  if (!r.verdicts.empty()) {
    out << "harmonicity verdicts (closed form vs oracle):\n";
    for (const auto& v : r.verdicts) {
      out << "  trial " << v.trial << "  x=" << vec_compact(v.x)
          << "  y=" << vec_compact(v.y) << "  closed="
          << (v.closed_holds ? "harmonic" : "not-harmonic");
      if (v.oracle_checked)
        out << "  oracle_residual=" << fmt12(v.oracle_residual)
            << (v.agree ? "  [agree]" : "  [DISAGREE]");
      out << "\n";
    }
  }
  out << "disagreements: " << r.disagreements << (r.failed ? "  FAILED" : "")
      << "\n";
  if (r.show_timings) out << "seconds: " << fmt12(r.seconds) << "\n";
  return out.str();
}

}  // namespace harmform
