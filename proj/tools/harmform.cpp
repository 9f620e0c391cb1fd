// Command-line driver: space analysis, randomized verification, Betti
// numbers and metric sweeps over space-spec JSON files.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harmform/report.hpp"

using namespace harmform;

namespace {

struct CommonArgs {
  std::string spec_path;
  std::uint64_t seed = 1;
  int trials = 50;
  std::string format = "table";
  std::string out;
  std::string oracle = "on";
  bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--spec", args->spec_path, "space-spec JSON file")
      ->required();
  cmd->add_option("--seed", args->seed, "PRNG seed (splitmix64)");
  cmd->add_option("--format", args->format, "json|csv|table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--out", args->out, "output path (default stdout)");
  cmd->add_option("--oracle", args->oracle,
                  "numerical cross-check: on|off|sample")
      ->check(CLI::IsMember({"on", "off", "sample"}));
  cmd->add_flag("--timings", args->timings, "include wall-clock timings");
}

ReportFormat parse_format(const std::string& f) {
  if (f == "json") return ReportFormat::Json;
  if (f == "csv") return ReportFormat::Csv;
  return ReportFormat::Table;
}

AnalyzeOptions::Oracle parse_oracle(const std::string& o) {
  if (o == "off") return AnalyzeOptions::Oracle::Off;
  if (o == "sample") return AnalyzeOptions::Oracle::Sample;
  return AnalyzeOptions::Oracle::On;
}

int write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant harmonic 3-forms on compact homogeneous spaces"};
  app.require_subcommand(1);

  CommonArgs args;
  bool inject_bug = false;
  int trials_analyze = 0;
  int sweep_block = -1;
  double sweep_from = 0.1, sweep_to = 2.0;
  int sweep_steps = 20;

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "full report for one space");
  add_common(analyze_cmd, &args);
  analyze_cmd->add_option("--trials", trials_analyze,
                          "extra sampled (x, y) pairs");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "randomized closed-form vs oracle cross-check");
  add_common(verify_cmd, &args);
  verify_cmd->add_option("--trials", args.trials, "sample count");
  verify_cmd->add_flag("--inject-bug", inject_bug,
                       "negative control: feed the closed form a stale metric");

  CLI::App* betti_cmd =
      app.add_subcommand("betti", "Betti numbers, formula vs oracle");
  add_common(betti_cmd, &args);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "sweep one block scaling over a grid");
  add_common(sweep_cmd, &args);
  sweep_cmd->add_option("--block", sweep_block,
                        "block index to sweep (default: last)");
  sweep_cmd->add_option("--from", sweep_from, "grid start");
  sweep_cmd->add_option("--to", sweep_to, "grid end");
  sweep_cmd->add_option("--steps", sweep_steps, "grid points");

  CLI11_PARSE(app, argc, argv);

  try {
    SpaceSpec spec = parse_spec(args.spec_path);

    if (analyze_cmd->parsed()) {
      AnalyzeOptions opt;
      opt.seed = args.seed;
      opt.trials = trials_analyze;
      opt.oracle = parse_oracle(args.oracle);
      opt.timings = args.timings;
      Report rep = analyze(spec, opt);
      int rc = write_out(args.out, report_emit(rep, parse_format(args.format)));
      if (rc) return rc;
      return rep.failed ? 1 : 0;
    }

    if (verify_cmd->parsed()) {
      std::string bundle = args.out.empty() ? "verify-repro.json" : args.out;
      std::string message;
      int rc =
          verify(spec, args.trials, args.seed, inject_bug, bundle, &message);
      std::cout << (rc == 0 ? "verify: " : "verify FAILED: ") << message
                << "\n";
      return rc;
    }

    if (betti_cmd->parsed()) {
      AnalyzeOptions opt;
      opt.seed = args.seed;
      opt.oracle = parse_oracle(args.oracle);
      Report rep = analyze(spec, opt);
      std::ostringstream out;
      out << rep.space << ": formula (b1,b2,b3) = (" << rep.b1_formula << ","
          << rep.b2_formula << "," << rep.b3_formula << ")";
      if (rep.b1_oracle >= 0)
        out << "  oracle = (" << rep.b1_oracle << "," << rep.b2_oracle << ","
            << rep.b3_oracle << ")";
      bool match = rep.b1_oracle < 0 || (rep.b1_formula == rep.b1_oracle &&
                                         rep.b2_formula == rep.b2_oracle &&
                                         rep.b3_formula == rep.b3_oracle);
      out << (match ? "  [match]" : "  [MISMATCH]") << "\n";
      int rc = write_out(args.out, out.str());
      return rc != 0 ? rc : match ? 0 : 1;
    }

    if (sweep_cmd->parsed()) {
      // one analyze per grid point over the chosen block scaling; every
      // admissible direction is tested at every point
      AnalyzeOptions opt;
      opt.seed = args.seed;
      opt.oracle = parse_oracle(args.oracle);
      Report probe = analyze(spec, opt);
      ThirdCohomology h3 = b3_dimension(*build_space(spec).embedding);
      const int blocks =
          probe.lie_group ? probe.dim_p : 2 * probe.s - 1;
      const int target = sweep_block >= 0 ? sweep_block : blocks - 1;
      if (target < 0 || target >= blocks)
        throw std::invalid_argument("sweep block index out of range");
      std::string rows = "t,y_index,closed_holds,oracle_residual,agree\n";
      bool any_disagree = false;
      for (int step = 0; step <= sweep_steps; ++step) {
        double tval = sweep_from + (sweep_to - sweep_from) * step /
                                       std::max(1, sweep_steps);
        SpaceSpec swept = spec;
        Eigen::VectorXd x = spec.x.size() ? spec.x
                                          : Eigen::VectorXd::Ones(blocks);
        x(target) = tval;
        swept.x = x;
        for (int yi = 0; yi < h3.b3; ++yi) {
          swept.y = h3.kernel.col(yi);
          Report rep = analyze(swept, opt);
          if (rep.verdicts.empty()) continue;
          const PairVerdict& v = rep.verdicts.front();
          rows += fmt12(tval) + "," + std::to_string(yi) + "," +
                  (v.closed_holds ? "1" : "0") + "," +
                  (v.oracle_checked ? fmt12(v.oracle_residual) : "") + "," +
                  (v.oracle_checked ? (v.agree ? "1" : "0") : "") + "\n";
          if (v.oracle_checked && !v.agree) any_disagree = true;
        }
      }
      int rc = write_out(args.out, rows);
      return rc != 0 ? rc : any_disagree ? 1 : 0;
    }
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
