#pragma once

#include <memory>
#include <vector>

#include "aci/model.hpp"
#include "aci/simulate.hpp"

namespace aci {

// First-order (dt -> 0) auxiliary matrices of the filter/smoother recursion,
// cached per step for diagnostics and cross-checks.  Roles:
//   gram_inv  inverse observational Gram (Sigma^x o Sigma^x)^{-1}, zero-padded
//             over neutralized rows/columns when an observation subset is active
//   gx        coupling plus cross-noise correction, (Sigma^x o Sigma^y) R^{-1}
//   gy        feedback plus process-noise correction, (Sigma^y o Sigma^y) R^{-1};
//             its equilibrium value sets the smoother memory decay rate
//   h         R^{-1} (feedback R + R feedback^T + Sigma^y o Sigma^y)
//   k         gram-normalized coupling, gram_inv * gx
//   e         one-step backward smoother gain to first order,
//             I + [(Sigma^y o Sigma^x) gram_inv gx - gy] dt
//   f         innovation-to-smoother residual gain to first order
// The production recursion uses the exact discrete gains (see FilterStep).
// e agrees with the exact backward gain to O(dt^2); f agrees with the exact
// innovation gain G - C(AG + J) of the one-step-lag mean update only to
// O(dt) -- their dt coefficients differ by
// (feedback - J coupling) R coupling^T gram_inv, a gap the test suite pins
// together with both convergence orders.
struct AuxFirstOrder {
  Mat gram_inv;  // k x k
  Mat gx;        // k x l
  Mat gy;        // l x l
  Mat h;         // l x l
  Mat k;         // k x l
  Mat e;         // l x l
  Mat f;         // l x k
};

// Per-step cache of the exact discrete update.  The filter state is indexed
// so that state[j] is the conditional law of y(t_j) given x(t <= t_j); the
// increment observation z_j = x_{j+1} - x_j is processed by step j.
//
// Stored quantities (A = active observation rows):
//   innovation       nu_j = z_A - (coupling_A mu + forcing_A) dt
//   innovation_cov   V_j  = (coupling_A R coupling_A^T dt + gram_AA) dt
//   update_incr      G_j nu_j, the measurement-update increment; adding it to
//                    state[j].mean gives the one-step-lag smoother mean
//   update_cov_decr  G_j V_j G_j^T, the PSD covariance reduction of the same
//   smoother_gain    exact one-step backward gain C_j; products of these form
//                    the bank's update matrices and decay like exp(-gy dt)
//   pred_mean/cov    plain one-step forecast of y_{j+1} ignoring z_j (used by
//                    the backward-range endpoint entry)
struct FilterStep {
  Vec innovation;
  Mat innovation_cov;
  Vec update_incr;
  Mat update_cov_decr;
  Mat smoother_gain;
  Vec pred_mean;
  Mat pred_cov;
  std::unique_ptr<AuxFirstOrder> aux;  // only with FilterOptions::cache_diagnostics
};

struct FilterOptions {
  // Initial conditional law; if mean/cov are empty, default_filter_init is used.
  GaussianState init;
  // Observed rows allowed to inform the Bayesian update (sorted, unique).
  // Empty means all rows.  When a proper subset is given, the observational
  // Gram must be block-diagonal between active and inactive rows at every
  // step (the infinite-uncertainty limit of a coupled Gram is order-dependent,
  // so that case is an error; use a large-noise model instead).
  std::vector<int> active_rows;
  bool cache_diagnostics = false;
  double psd_rel_tol = 1e-10;
};

struct FilterSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<GaussianState> state;  // j = 0..N
  std::vector<FilterStep> step;      // j = 0..N-1
  std::vector<int> active_rows;      // as resolved (full list if none given)

  int steps() const { return static_cast<int>(step.size()); }
  double time(int j) const { return t0 + j * dt; }
  // One-step-lag smoother state at j (the posterior after seeing z_j).
  GaussianState boundary(int j) const;
};

// mu = 0, R = identity scaled per-coordinate by a crude equilibrium variance
// estimate (Sigma^y o Sigma^y)_ii / (2 |feedback_ii|) at (t0, x0), falling
// back to 1.0 where the diagonal feedback vanishes or the estimate is not
// positive.
GaussianState default_filter_init(const CgnsModel& m, double t0, const Vec& x0);

// Run the conditional Gaussian filter along the observed block of `traj`.
// Exact discrete Bayes for the Euler-discretized model: correlated
// process/observation noise is decorrelated through the standard substitution
// and the measurement update factored out, so downstream smoothing is an
// exact fixed-point accumulation.  Throws Error (with the step index) if an
// innovation or posterior covariance loses positive definiteness.
FilterSeries run_filter(const CgnsModel& m, const Trajectory& traj,
                        const FilterOptions& opt = {});

// CSV export: header t,mu_0..mu_{l-1},R_00,R_01,.. (upper triangle, row-major),
// one row per grid index, %.12g.
void write_filter_csv(const FilterSeries& fs, const std::string& path);

}  // namespace aci
