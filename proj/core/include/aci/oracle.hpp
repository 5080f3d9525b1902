#pragma once

#include <vector>

#include "aci/model.hpp"
#include "aci/simulate.hpp"

namespace aci {
namespace oracle {

// Reference implementations used by the test suite to cross-check the
// production recursions through an independent route.  Everything here favors
// the most literal textbook arrangement over speed; none of it is called by
// the production pipeline.

// One Euler step of the conditional system at (t_j, x_j), written as a
// standard linear-Gaussian state-space step
//     y_{j+1} = a y_j + u + w,     z_j = h y_j + c + v,
// with jointly Gaussian (w, v): Cov(w) = q, Cov(v) = rv, Cov(w, v) = s.
// Here z_j is the observed increment x_{j+1} - x_j.
struct LinearStepModel {
  Mat a;
  Vec u;
  Mat h;
  Vec c;
  Mat q;
  Mat rv;
  Mat s;
};

LinearStepModel discrete_step_model(const CgnsModel& m, double t, const Vec& x,
                                    double dt);

struct KalmanRtsResult {
  // filtered[j] is the law of y_j given z_0..z_{j-1} (filtered[0] = init);
  // posterior[j] is the law of y_j given z_0..z_j;
  // smoothed[j] is the law of y_j given all increments.
  std::vector<GaussianState> filtered;
  std::vector<GaussianState> posterior;
  std::vector<GaussianState> smoothed;
};

// Forward pass by joint conditioning of (y_j, y_{j+1}) on z_j, backward pass
// by the Rauch-Tung-Striebel sweep on the stored pairwise laws.  The pairwise
// route handles the process/measurement noise correlation without the
// decorrelating substitution the production filter uses, which is what makes
// the comparison meaningful.
KalmanRtsResult kalman_rts(const std::vector<LinearStepModel>& steps,
                           const std::vector<Vec>& z,
                           const GaussianState& init);

// Convenience overload: assemble the per-step models and increments from a
// simulated trajectory, then run the sweep.
KalmanRtsResult kalman_rts(const CgnsModel& m, const Trajectory& traj,
                           const GaussianState& init);

// Relative entropy between two Gaussians (dimension 1 or 2) by trapezoid
// quadrature of p log(p/q) on a regular grid covering both laws out to nine
// standard deviations.  Spectrally accurate for these integrands; used to
// validate the closed form.
double kl_quadrature(const GaussianState& p, const GaussianState& q,
                     int points_per_dim = 401);

// Threshold-averaged influence lengths evaluated the slow way: partition the
// threshold axis at the profile's distinct values and, on every interval,
// recompute the subjective length by a full scan of the definition.
double forward_length_exact(const std::vector<double>& profile, double dt_eff,
                            double span);
double backward_length_exact(const std::vector<double>& profile, double dt_eff,
                             double horizon);

}  // namespace oracle
}  // namespace aci
