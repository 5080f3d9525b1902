#pragma once

// End-to-end runs: build a model from a configuration, simulate it, execute
// every configured causal query, and write a self-describing artifact
// directory (CSV tables, optional SVG figures, an effective-config echo for
// exact reruns, and a metadata file).

#include <string>
#include <vector>

#include "aci/cir.hpp"
#include "aci/config.hpp"
#include "aci/simulate.hpp"

namespace aci {

// Instantiate the model selected by `mc`, with its parameter overrides.
CgnsModel make_model(const ModelChoice& mc);

// Canned configurations for the studied regimes.  Valid names:
//   climate-eps001     two-scale climate model, scale separation 0.01
//   climate-eps01      same model, scale separation 0.1
//   multiscale-default slow/fast triad with state-dependent observation noise
//   lorenz84-default   stochastic Lorenz 84 with hidden zonal flow
//   reduced-linear     linear two-component benchmark with periodic forcing
// Throws Error for anything else.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

struct ExperimentResult {
  std::string out_dir;
  Trajectory trajectory;
  // One series per configured query, restricted to the analysis window.
  std::vector<CirSeries> series;
};

// Run the whole configuration.  Artifacts land under cfg.out_dir:
//   config.ini          effective configuration (re-runnable, byte-stable)
//   metadata.txt        model/grid/query summary, no timestamps
//   trajectory.csv(.meta)  when [output] trajectory = true
//   cir-<query>.csv     influence-range table per query
//   figure-<query>.svg  when [output] svg = true
//   filter-<query>.csv, bank-<query>.csv  when the debug flags are set
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Standalone two-row figure (influence values, then ranges with the backward
// series drawn downward) for an already-computed series; used by the `plot`
// verb to re-render exported CSV tables.
void write_cir_figure(const std::string& path, const CirSeries& series);

}  // namespace aci
