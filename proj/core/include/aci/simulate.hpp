#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "aci/model.hpp"

namespace aci {

// A sampled path of the full CGNS state on a uniform grid.  Row j of `state`
// is [x(t_j), y(t_j)] for t_j = t0 + j*dt; the observed block occupies the
// first obs_dim columns.  The hidden block is the simulation truth (for
// diagnostics and partition overrides) and may be absent when a trajectory
// was loaded from an observations-only file.
struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;
  int obs_dim = 0;
  int hidden_dim = 0;  // 0 when hidden states were not stored
  Mat state;           // (steps+1) x (obs_dim + hidden_dim)
  std::uint64_t seed = 0;
  std::string model_name;

  int steps() const { return static_cast<int>(state.rows()) - 1; }
  double time(int j) const { return t0 + j * dt; }
  // Observed sub-path as an expression (no copy).
  auto obs() const { return state.leftCols(obs_dim); }
  auto hidden() const { return state.rightCols(hidden_dim); }
  // Grid index nearest to time t (clamped to the valid range).
  int index_of(double t) const;
};

struct SimulateOptions {
  Vec x0;                  // initial observed state (k)
  Vec y0;                  // initial hidden state (l)
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  bool store_hidden = true;
};

// One explicit Euler-Maruyama step of the full CGNS state.  dw1/dw2 are the
// Wiener increments over dt (caller supplies them; the simulator draws them
// from the counter-based stream as sqrt(dt) * normal(seed, step, channel),
// channels ordered W1 first then W2).
void euler_maruyama_step(const CgnsModel& m, double t, double dt,
                         const Vec& x, const Vec& y,
                         const Vec& dw1, const Vec& dw2,
                         Vec& x_next, Vec& y_next);

// Integrate the model over [t0, t_end].  Throws Error with the offending time
// index if the state becomes non-finite (blow-up detection).
Trajectory simulate(const CgnsModel& m, const SimulateOptions& opt);

// CSV round trip.  Format: header "t,x_0,..,x_{k-1},y_0,..,y_{l-1}" (hidden
// columns only if stored), rows printed with %.12g.  A sidecar of key=value
// metadata lines (seed, dt, model, dims) goes to `path + ".meta"`.
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace aci
