#pragma once

#include "aci/model.hpp"

namespace aci {

// Three-variable climate box model: slow observed temperature-like variable x
// driven by a hidden fast mode y and a hidden slowly wandering control
// parameter gamma.  The gamma*x product is linear in gamma with an
// observed-state coefficient, so hiding (y, gamma) keeps the conditional
// structure intact.
struct ClimateParams {
  double eps = 0.01;        // timescale separation of the fast mode
  double d_x = 1.0 / 3.0;   // cubic damping of x
  double alpha = 4.0;       // feedback of y onto x
  double sigma_x = 0.2;
  double d_y = 0.2;
  double beta = -0.8;
  double sigma_y = 0.3;
  double d_gamma = 0.5;     // relaxation rate of the control parameter
  double gamma_bar = 1.0;   // its relaxation target
  double sigma_gamma = 2.0;
};

// Canonical partition: observe x, hide (y, gamma); hidden index 0 is y,
// index 1 is gamma.
CgnsModel climate_model(const ClimateParams& p);

// Alternative partition for queries whose effect variable is y: observe
// (x, y), hide gamma.  Still conditionally Gaussian because gamma enters
// every equation linearly with observed-state coefficients.
CgnsModel climate_model_gamma_hidden(const ClimateParams& p);

// Two slow atmosphere modes (x1, x2) coupled to two fast weather modes
// (y1, y2) through energy-conserving quadratic interactions, with the x
// equations carrying correlated additive and multiplicative noise on the
// weather channels.
struct MultiscaleParams {
  double a1 = 1.0;
  double c1 = 1.0 / 3.0;
  double m = 0.5;         // constant part of the quadratic interaction
  double m1 = 0.5;
  double m2 = -1.5;
  double i11 = 0.6;       // multiplicative couplings x_i * y_j
  double i12 = 0.0;
  double i21 = 0.0;
  double i22 = 2.5;
  double l11 = 1.0;       // additive couplings y_j -> x_i
  double l12 = 0.0;
  double l21 = 0.0;
  double l22 = 1.5;
  double fx1_base = 0.0;  // slow forcing of x1 (constant here)
  double sigma_x1 = 0.15;
  double c2 = 0.4;
  double fx2_base = 4.0;  // seasonal forcing of x2: base + amp*sin(2 pi t/P)
  double fx2_amp = 2.0;
  double fx2_period = 18.0;
  double sigma_x2 = 0.3;
  double gamma1 = 0.5;    // weather damping rates (divided by eps)
  double gamma2 = 1.2;
  double eps = 0.1;
  double n = 4.0;         // weather-mode rotation frequency
  double fy1 = 1.0;
  double fy2 = -1.0;
  double sigma_y1 = 1.0;
  double sigma_y2 = 2.0;
};

CgnsModel multiscale_model(const MultiscaleParams& p);

// Noisy Lorenz-84 circulation model with the zonal flow x hidden and the two
// wave modes (y, z) observed; seasonal forcing enters the hidden equation.
struct Lorenz84Params {
  double a = 0.25;         // zonal damping (below 1: slower than the waves)
  double b = 4.0;          // displacement of the waves by the flow
  double g = 1.0;          // symmetric wave forcing
  double f_base = 8.0;     // seasonal forcing: base + amp*cos(2 pi t/P)
  double f_amp = 3.0;
  double f_period = 73.0;
  double sigma_x = 0.2;
  double sigma_y = 0.2;
  double sigma_z = 0.2;
};

// Observed index 0 is y, index 1 is z; the hidden variable is x.
CgnsModel lorenz84_model(const Lorenz84Params& p);

// Scalar conditionally linear pair with state-independent rates: the
// workhorse for equilibrium statistics and the bounded-range law of the
// backward influence length.
struct ReducedLinearParams {
  double lambda_x = 1.0;   // coupling of y into the observed equation
  double lambda_y = -1.0;  // feedback rate (must be negative for equilibria)
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double fx_base = 0.0;    // forcings: base + amp*sin(2 pi t/P)
  double fx_amp = 0.0;
  double fx_period = 1.0;
  double fy_base = 0.0;
  double fy_amp = 0.0;
  double fy_period = 1.0;
};

CgnsModel reduced_linear_model(const ReducedLinearParams& p);

// Stationary filter variance, smoother variance, and smoother-memory decay
// rate of the reduced pair, from the closed-form solutions of the algebraic
// Riccati and Sylvester equations.  The backward influence profile decays
// like exp(-2 * gain * lag) once both recursions equilibrate.
struct EquilibriumStats {
  double filter_var = 0.0;
  double smoother_var = 0.0;
  double gain = 0.0;
};

EquilibriumStats equilibrium_stats(const ReducedLinearParams& p);

}  // namespace aci
