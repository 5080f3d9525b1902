#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "aci/cir.hpp"
#include "aci/config.hpp"
#include "aci/experiment.hpp"
#include "aci/validation.hpp"

namespace {

std::string preset_list() {
  std::string s;
  for (const std::string& n : aci::preset_names()) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

struct Overrides {
  std::string out_dir;
  std::uint64_t seed = 0;
  double dt = 0.0;
  int lag_cap = 0;
  bool exact_cir = false;
  std::string conditioning_mode;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "artifact directory override");
    cmd->add_option("--seed", seed, "simulation seed override");
    cmd->add_option("--dt", dt, "integration step override")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lag-cap", lag_cap,
                    "smoother truncation lag override (grid steps)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--exact-cir", exact_cir,
                  "also compute threshold-averaged exact range lengths");
    cmd->add_option("--conditioning-mode", conditioning_mode,
                    "force this conditioning mode on every query")
        ->check(CLI::IsMember({"exact-limit", "large-noise"}));
  }

  void apply(const CLI::App* cmd, aci::ExperimentConfig& cfg) const {
    if (cmd->count("--out-dir")) cfg.out_dir = out_dir;
    if (cmd->count("--seed")) cfg.seed = seed;
    if (cmd->count("--dt")) cfg.dt = dt;
    if (cmd->count("--lag-cap")) cfg.lag_cap = lag_cap;
    if (cmd->count("--exact-cir")) cfg.exact = true;
    if (cmd->count("--conditioning-mode"))
      for (aci::QuerySpec& q : cfg.queries) q.mode = conditioning_mode;
  }
};

int report_run(const aci::ExperimentResult& res) {
  for (const aci::CirSeries& s : res.series)
    std::printf("query '%s': %zu analysis points\n", s.label.c_str(),
                s.points.size());
  std::printf("artifacts in %s\n", res.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Assimilative causal influence analysis for partially observed "
      "stochastic systems: simulate, filter/smooth, and measure how far each "
      "hidden driver's influence reaches forward and backward in time."};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate the configured model and write the trajectory");
  sim->add_option("--config", config_path, "experiment configuration (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  ov.add_to(sim);

  CLI::App* an = app.add_subcommand(
      "analyze", "run the configured causal queries end to end");
  an->add_option("--config", config_path, "experiment configuration (INI)")
      ->required()
      ->check(CLI::ExistingFile);
  ov.add_to(an);

  CLI::App* rep = app.add_subcommand("reproduce", "run a canned study preset");
  std::string preset;
  rep->add_option("preset", preset, "one of: " + preset_list())->required();
  ov.add_to(rep);

  CLI::App* val =
      app.add_subcommand("validate", "run the acceptance criteria suite");
  aci::ValidationOptions vopt;
  val->add_option("--only", vopt.only,
                  "criterion ids to run (default: all ten)")
      ->delimiter(',');
  val->add_option("--work-dir", vopt.work_dir,
                  "scratch and report directory");

  CLI::App* plot = app.add_subcommand(
      "plot", "re-render an exported influence-range CSV as an SVG figure");
  std::string plot_in, plot_out;
  plot->add_option("input", plot_in, "cir-*.csv produced by analyze/reproduce")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("-o,--out", plot_out,
                   "output SVG path (default: input with .svg suffix)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      aci::ExperimentConfig cfg = aci::parse_config(config_path);
      ov.apply(sim, cfg);
      cfg.queries.clear();
      cfg.write_trajectory = true;
      return report_run(aci::run_experiment(cfg));
    }
    if (an->parsed()) {
      aci::ExperimentConfig cfg = aci::parse_config(config_path);
      ov.apply(an, cfg);
      return report_run(aci::run_experiment(cfg));
    }
    if (rep->parsed()) {
      aci::ExperimentConfig cfg = aci::preset_config(preset);
      ov.apply(rep, cfg);
      return report_run(aci::run_experiment(cfg));
    }
    if (val->parsed()) {
      const std::vector<aci::CriterionResult> results =
          aci::run_acceptance(vopt);
      aci::print_results(results, stdout);
      return aci::all_gating_passed(results) ? 0 : 1;
    }
    if (plot->parsed()) {
      aci::CirSeries s = aci::read_cir_csv(plot_in);
      const std::filesystem::path in(plot_in);
      s.label = in.stem().string();
      const std::string out =
          plot_out.empty() ? (in.parent_path() / (in.stem().string() + ".svg"))
                                 .string()
                           : plot_out;
      aci::write_cir_figure(out, s);
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
