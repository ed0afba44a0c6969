// Command-line front end: parses a TOML config, dispatches to the harness,
// and writes CSV / SVG artifacts plus a resolved-config echo next to them.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "depsvm/config.hpp"
#include "depsvm/csvio.hpp"
#include "depsvm/harness.hpp"
#include "depsvm/mixing.hpp"
#include "depsvm/schedule.hpp"
#include "depsvm/version.hpp"

namespace {

using depsvm::ResolvedConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "TOML experiment config")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides, "override key.path=value (repeatable)");
  cmd->add_option("--jobs", args.jobs, "worker threads for grid cells");
}

std::string out_path(const CommonArgs& args, const ResolvedConfig& rc,
                     const std::string& suffix) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / (rc.experiment.name + suffix)).string();
}

void write_metadata(const CommonArgs& args, const ResolvedConfig& rc) {
  std::string meta = "# resolved configuration (defaults included)\n";
  meta += "version = \"" + std::string(depsvm::kVersion) + "\"\n";
  meta += depsvm::toml::serialize(rc.resolved);
  depsvm::write_file(out_path(args, rc, ".meta.toml"), meta);
}

void print_warnings(const ResolvedConfig& rc) {
  for (const std::string& w : rc.warnings) std::cerr << "warning: " << w << "\n";
}

int finish(const std::vector<std::string>& violations) {
  nlohmann::json summary;
  summary["violations"] = violations;
  summary["ok"] = violations.empty();
  std::cout << summary.dump() << "\n";
  return violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SVM learning from dependent observations"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* sim = app.add_subcommand("simulate", "emit one dependent path as CSV");
  auto* mix = app.add_subcommand("mixing", "per-lag mixing coefficient table");
  auto* train_cmd = app.add_subcommand("train", "single solve report");
  auto* sched = app.add_subcommand("schedule", "schedule validity verdict");
  auto* sweep = app.add_subcommand("sweep", "consistency experiment");
  auto* stab = app.add_subcommand("stability", "stability-bound check");
  auto* lln = app.add_subcommand("lln", "law-of-large-numbers diagnostics");
  for (CLI::App* cmd : {sim, mix, train_cmd, sched, sweep, stab, lln}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const ResolvedConfig rc = depsvm::load_config(args.config_path, args.overrides);
    print_warnings(rc);
    const depsvm::ExperimentConfig& cfg = rc.experiment;
    std::vector<std::string> violations;

    if (sim->parsed()) {
      const depsvm::TrainingSet path =
          depsvm::sample_path(cfg.process, rc.simulate_seed, rc.simulate_n);
      depsvm::write_file(out_path(args, rc, "_path.csv"), depsvm::path_csv(path));
      write_metadata(args, rc);
      return finish(violations);
    }

    if (mix->parsed()) {
      const auto* chain = cfg.process.chain();
      if (!chain) throw std::invalid_argument("mixing: process must be a markov_chain");
      std::vector<depsvm::MixingReport> reports;
      for (int lag = 1; lag <= rc.mixing_lags; ++lag)
        reports.push_back(
            depsvm::mixing_report(depsvm::markov_lag_joint(*chain, 1, 1 + lag), lag));
      depsvm::write_file(out_path(args, rc, "_mixing.csv"), depsvm::mixing_csv(reports));
      write_metadata(args, rc);
      return finish(violations);
    }

    if (sched->parsed()) {
      const depsvm::Verdict v = depsvm::schedule_verdict(cfg);
      std::string csv = "valid,limiting_exponent,binding_condition,c,gamma\n";
      csv += std::string(v.valid ? "1" : "0") + "," +
             depsvm::format_g17(v.limiting_exponent) + ",\"" + v.binding_condition +
             "\"," + depsvm::format_g17(cfg.schedule.c) + "," +
             depsvm::format_g17(cfg.schedule.gamma) + "\n";
      depsvm::write_file(out_path(args, rc, "_schedule.csv"), csv);
      write_metadata(args, rc);
      std::cout << (v.valid ? "valid" : "invalid")
                << " limiting_exponent=" << v.limiting_exponent << " ("
                << v.binding_condition << ")\n";
      return finish(violations);
    }

    if (train_cmd->parsed()) {
      const int n = cfg.n_grid.back();
      const double lambda = cfg.schedule.lambda(n);
      const depsvm::TrainingSet t =
          depsvm::sample_path(cfg.process, cfg.seeds.front(), n);
      depsvm::TrainOptions opts;
      opts.tol = cfg.tol;
      const depsvm::SvmSolution sol =
          depsvm::train(t, cfg.loss, cfg.kernel, lambda, opts);
      std::string csv =
          "n,lambda,objective,empirical_risk,f_norm,opt_residual,iterations\n";
      csv += std::to_string(n) + "," + depsvm::format_g17(lambda) + "," +
             depsvm::format_g17(sol.objective) + "," +
             depsvm::format_g17(sol.empirical_risk) + "," +
             depsvm::format_g17(sol.norm) + "," +
             depsvm::format_g17(sol.opt_residual) + "," +
             std::to_string(sol.iterations) + "\n";
      depsvm::write_file(out_path(args, rc, "_train.csv"), csv);
      write_metadata(args, rc);
      std::cout << "objective=" << sol.objective << " residual=" << sol.opt_residual
                << " iterations=" << sol.iterations << "\n";
      if (sol.opt_residual > cfg.tol) violations.push_back("solver residual above tol");
      return finish(violations);
    }

    if (sweep->parsed()) {
      const depsvm::Verdict v = depsvm::schedule_verdict(cfg);
      if (!v.valid)
        std::cerr << "warning: schedule invalid (" << v.binding_condition
                  << "); running as a negative control\n";
      const depsvm::ExperimentResult result = depsvm::run_consistency(cfg, args.jobs);
      depsvm::write_file(out_path(args, rc, "_sweep.csv"), depsvm::sweep_csv(result));
      depsvm::write_file(out_path(args, rc, "_sweep.svg"), depsvm::sweep_svg(result));
      write_metadata(args, rc);
      if (result.norm_violations > 0)
        violations.push_back("norm bound violated on " +
                             std::to_string(result.norm_violations) + " rows");
      return finish(violations);
    }

    if (stab->parsed()) {
      const depsvm::StabilityResult result = depsvm::run_stability(cfg, args.jobs);
      depsvm::write_file(out_path(args, rc, "_stability.csv"),
                         depsvm::stability_csv(result));
      write_metadata(args, rc);
      if (result.violations > 0)
        violations.push_back("stability bound violated on " +
                             std::to_string(result.violations) + " rows");
      if (result.h_violations > 0)
        violations.push_back("witness sup bound violated on " +
                             std::to_string(result.h_violations) + " rows");
      return finish(violations);
    }

    if (lln->parsed()) {
      const auto tables = depsvm::run_lln(cfg);
      depsvm::write_file(out_path(args, rc, "_lln.csv"), depsvm::lln_csv(tables));
      write_metadata(args, rc);
      return finish(violations);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    nlohmann::json summary;
    summary["violations"] = {std::string(e.what())};
    summary["ok"] = false;
    std::cout << summary.dump() << "\n";
    return 2;
  }
  return 0;
}
