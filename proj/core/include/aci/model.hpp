#pragma once

#include <functional>
#include <string>
#include <utility>

#include "aci/types.hpp"

namespace aci {

// Conditionally Gaussian nonlinear stochastic system.  The state splits into
// an observed block x (dim k) and a hidden block y (dim l); the drift of both
// blocks is affine in y with coefficients that may depend arbitrarily on
// (t, x):
//
//   dx/dt = coupling(t,x) y + obs_forcing(t,x)    + obs_noise_1 dW1 + obs_noise_2 dW2
//   dy/dt = feedback(t,x) y + hidden_forcing(t,x) + hidden_noise_1 dW1 + hidden_noise_2 dW2
//
// W1 and W2 are independent vector Wiener processes (dims nchan1, nchan2); a
// channel shared between an obs_noise_* and hidden_noise_* column produces
// correlated observation/process noise, which the filter handles exactly.
//
// Evaluators must be pure functions of (t, x): no internal state, no RNG.
// The filter caches their values per step and re-evaluation must agree.
struct CgnsModel {
  int obs_dim = 0;     // k
  int hidden_dim = 0;  // l
  int nchan1 = 0;      // channels of W1
  int nchan2 = 0;      // channels of W2

  using MatFn = std::function<Mat(double, const Vec&)>;
  using VecFn = std::function<Vec(double, const Vec&)>;

  MatFn coupling;        // k x l
  VecFn obs_forcing;     // k
  MatFn feedback;        // l x l
  VecFn hidden_forcing;  // l
  MatFn obs_noise_1;     // k x nchan1
  MatFn obs_noise_2;     // k x nchan2
  MatFn hidden_noise_1;  // l x nchan1
  MatFn hidden_noise_2;  // l x nchan2

  std::string name;

  int nchan() const { return nchan1 + nchan2; }
  void check() const;  // throws Error on inconsistent dims / missing evaluators
};

// Gram contraction of two noise-block pairs over shared channels:
//   (a1, a2) o (b1, b2) = a1 b1^T + a2 b2^T.
// All observation/process covariances in the filter are built from this.
Mat noise_gram(const Mat& a1, const Mat& a2, const Mat& b1, const Mat& b2);

// Convenience constructors for models with constant (possibly t-dependent
// via lambdas) blocks are provided by the presets module.

}  // namespace aci
