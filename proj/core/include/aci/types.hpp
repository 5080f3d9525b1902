#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace aci {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// All recoverable library failures throw this (bad inputs, degenerate
// covariances, config violations, simulation blow-ups).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mean and covariance of a conditional Gaussian distribution.  Covariance is
// kept symmetric by construction everywhere in the library; consumers may rely
// on cov == cov^T up to round-off.
struct GaussianState {
  Vec mean;
  Mat cov;

  GaussianState() = default;
  GaussianState(Vec m, Mat c) : mean(std::move(m)), cov(std::move(c)) {}
  Eigen::Index dim() const { return mean.size(); }
};

// Symmetrize in place: R <- (R + R^T)/2.
inline void symmetrize(Mat& r) {
  r = ((r + r.transpose()) * 0.5).eval();
}

// Enforce positive semi-definiteness.  Cheap necessary checks run first; the
// eigenvalue clip (negative eigenvalues set to zero) only runs when the matrix
// is indefinite beyond -rel_tol * trace.  Returns true if a clip was applied.
bool enforce_psd(Mat& r, double rel_tol = 1e-10);

// Extract the marginal of a Gaussian on a coordinate subset (order-preserving).
GaussianState marginal_state(const GaussianState& s, const std::vector<int>& indices);

}  // namespace aci
