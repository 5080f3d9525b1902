#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aci/presets.hpp"
#include "aci/types.hpp"

namespace aci {

// Which system an experiment runs on, carrying every preset's parameter set
// so individual values can be overridden from the config file.
struct ModelChoice {
  std::string kind = "reduced-linear";  // climate | climate-gamma-hidden |
                                        // multiscale | lorenz84 |
                                        // reduced-linear
  ClimateParams climate;
  MultiscaleParams multiscale;
  Lorenz84Params lorenz84;
  ReducedLinearParams reduced;
};

struct QuerySpec {
  std::string name;   // section suffix, used as the artifact basename
  std::string label;  // free-text description (defaults to name)
  std::vector<int> cause;
  std::vector<int> effect;
  std::vector<int> cond_obs;
  std::vector<int> cond_hidden;
  std::string mode = "exact-limit";  // or large-noise
  double noise_scale = 1e6;
};

struct ExperimentConfig {
  ModelChoice model;

  // [simulation]
  std::uint64_t seed = 1;
  double dt = 1e-3;
  double t_start = 0.0;
  double t_end = 10.0;
  std::vector<double> x0;  // empty: zeros
  std::vector<double> y0;

  // [analysis] — rows are emitted for t in [window_start, window_end];
  // simulation time outside the window equilibrates the recursions and feeds
  // the forward profiles.  Keys left out of the config file default to the
  // full simulation span.
  double window_start = 0.0;
  double window_end = 0.0;
  int stride = 10;
  int lag_cap = 5000;
  double lag_tol = 1e-6;
  bool exact = false;

  // [output]
  std::string out_dir = "aci-out";
  bool svg = true;
  bool write_trajectory = true;
  bool write_filter = false;
  bool write_bank = false;

  std::vector<QuerySpec> queries;
};

// Strict INI: sections [model], [simulation], [analysis], [output], and one
// [queries.<name>] per query.  Comments start with '#' or ';'.  Unknown
// sections or keys are errors citing file and line, as are malformed values.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name);

// The config serialized back to INI (every effective value, including
// defaults), suitable for byte-identical reruns.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace aci
