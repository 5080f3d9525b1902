#pragma once

#include <string>
#include <vector>

#include "aci/cir.hpp"
#include "aci/filter.hpp"
#include "aci/model.hpp"
#include "aci/simulate.hpp"
#include "aci/smoother.hpp"

namespace aci {

// A causal question "does the cause block of the hidden state drive the
// effect block of the observations, given that the remaining coordinates are
// ruled out as carriers?"  Observed non-effect coordinates are neutralized in
// the analysis stage; hidden non-cause coordinates are jointly estimated and
// marginalized away.
struct CausalQuery {
  // Hidden coordinates whose assessment the divergences are taken on.
  // Empty: every hidden coordinate outside conditioning_hidden.
  std::vector<int> cause_indices;
  // Observed coordinates forming the effect.  Empty: the complement of
  // conditioning_observed.
  std::vector<int> effect_indices;
  // Observed coordinates barred from informing the Bayesian update.
  std::vector<int> conditioning_observed;
  // Hidden coordinates handled purely by marginalization.
  std::vector<int> conditioning_hidden;

  enum class Mode {
    // Realize the infinite-uncertainty limit exactly: the neutralized rows
    // never enter the update.  Requires the observation noise Gram to be
    // block-diagonal between effect and neutralized rows (the limit of a
    // coupled Gram depends on the order noise levels are sent to infinity).
    kExactLimit,
    // Scale the neutralized rows' noise loadings by noise_scale and run the
    // unmodified pipeline; validates the limit and covers coupled Grams.
    kLargeNoise,
  };
  Mode mode = Mode::kExactLimit;
  double noise_scale = 1e6;

  std::string label;
};

// Analysis-stage model for the query: unchanged in exact-limit mode (the
// filter's active-row policy carries the conditioning), or a copy with the
// neutralized rows' noise loadings scaled up in large-noise mode.
CgnsModel apply_conditioning(const CgnsModel& m, const CausalQuery& q);

// Resolved index sets after defaulting and validation.
struct ResolvedQuery {
  std::vector<int> cause;
  std::vector<int> effect;
  std::vector<int> cond_obs;
  std::vector<int> cond_hidden;
};

ResolvedQuery resolve_query(const CgnsModel& m, const CausalQuery& q);

struct QueryRunOptions {
  FilterOptions filter;      // active_rows is set by the query
  SmootherOptions smoother;  // cause_indices is set by the query
  // Debug sinks: when nonempty, the intermediate filter pass / final
  // smoother bank are written to these CSV paths.
  std::string filter_csv;
  std::string bank_csv;
};

// Full pipeline: conditioning -> filter -> online smoother -> influence
// ranges marginalized onto the cause block, assembled per analysis time.
CirSeries run_query(const CgnsModel& m, const Trajectory& traj,
                    const CausalQuery& q, const QueryRunOptions& opt = {});

}  // namespace aci
