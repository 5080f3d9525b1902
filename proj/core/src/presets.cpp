#include "aci/presets.hpp"

#include <fmt/format.h>

#include <cmath>

namespace aci {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(fmt::format("invalid model parameters: {}", what));
}

double sinusoid(double base, double amp, double period, double t) {
  return base + amp * std::sin(2.0 * M_PI * t / period);
}

}  // namespace

CgnsModel climate_model(const ClimateParams& p) {
  require(p.eps > 0.0 && p.eps < 1.0, "timescale separation must be in (0,1)");
  require(p.d_x > 0.0 && p.d_y > 0.0 && p.d_gamma > 0.0,
          "damping rates must be positive");
  require(p.sigma_x > 0.0 && p.sigma_y > 0.0 && p.sigma_gamma > 0.0,
          "noise amplitudes must be positive");

  CgnsModel m;
  m.name = "climate";
  m.obs_dim = 1;
  m.hidden_dim = 2;
  m.nchan1 = 1;  // observed channel W_x
  m.nchan2 = 2;  // hidden channels (W_y, W_gamma)
  m.coupling = [p](double, const Vec&) {
    Mat lx(1, 2);
    lx << -p.alpha, 0.0;
    return lx;
  };
  m.obs_forcing = [p](double, const Vec& x) {
    Vec f(1);
    f << x[0] - p.d_x * x[0] * x[0] * x[0];
    return f;
  };
  m.feedback = [p](double, const Vec& x) {
    Mat ly(2, 2);
    ly << -p.d_y / p.eps, x[0], 0.0, -p.d_gamma;
    return ly;
  };
  m.hidden_forcing = [p](double, const Vec&) {
    Vec f(2);
    f << p.beta, p.d_gamma * p.gamma_bar;
    return f;
  };
  m.obs_noise_1 = [p](double, const Vec&) {
    Mat s(1, 1);
    s << p.sigma_x;
    return s;
  };
  m.obs_noise_2 = [](double, const Vec&) { return Mat::Zero(1, 2); };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(2, 1); };
  m.hidden_noise_2 = [p](double, const Vec&) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = p.sigma_y / std::sqrt(p.eps);
    s(1, 1) = p.sigma_gamma;
    return s;
  };
  return m;
}

CgnsModel climate_model_gamma_hidden(const ClimateParams& p) {
  require(p.eps > 0.0 && p.eps < 1.0, "timescale separation must be in (0,1)");
  require(p.d_x > 0.0 && p.d_y > 0.0 && p.d_gamma > 0.0,
          "damping rates must be positive");
  require(p.sigma_x > 0.0 && p.sigma_y > 0.0 && p.sigma_gamma > 0.0,
          "noise amplitudes must be positive");

  CgnsModel m;
  m.name = "climate-gamma-hidden";
  m.obs_dim = 2;  // (x, y)
  m.hidden_dim = 1;
  m.nchan1 = 2;  // (W_x, W_y)
  m.nchan2 = 1;  // W_gamma
  m.coupling = [](double, const Vec& x) {
    Mat lx(2, 1);
    lx << 0.0, x[0];  // gamma enters dy/dt with coefficient x
    return lx;
  };
  m.obs_forcing = [p](double, const Vec& x) {
    Vec f(2);
    f << x[0] - p.d_x * x[0] * x[0] * x[0] - p.alpha * x[1],
        p.beta - p.d_y / p.eps * x[1];
    return f;
  };
  m.feedback = [p](double, const Vec&) {
    Mat ly(1, 1);
    ly << -p.d_gamma;
    return ly;
  };
  m.hidden_forcing = [p](double, const Vec&) {
    Vec f(1);
    f << p.d_gamma * p.gamma_bar;
    return f;
  };
  m.obs_noise_1 = [p](double, const Vec&) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = p.sigma_x;
    s(1, 1) = p.sigma_y / std::sqrt(p.eps);
    return s;
  };
  m.obs_noise_2 = [](double, const Vec&) { return Mat::Zero(2, 1); };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(1, 2); };
  m.hidden_noise_2 = [p](double, const Vec&) {
    Mat s(1, 1);
    s << p.sigma_gamma;
    return s;
  };
  return m;
}

CgnsModel multiscale_model(const MultiscaleParams& p) {
  require(p.gamma1 > 0.0 && p.gamma2 > 0.0, "weather dampings must be positive");
  require(p.eps > 0.0 && p.eps < 1.0, "timescale separation must be in (0,1)");
  require(p.sigma_x1 > 0.0 && p.sigma_x2 > 0.0 && p.sigma_y1 > 0.0 &&
              p.sigma_y2 > 0.0,
          "noise amplitudes must be positive");

  CgnsModel m;
  m.name = "multiscale";
  m.obs_dim = 2;
  m.hidden_dim = 2;
  m.nchan1 = 2;  // (W_x1, W_x2)
  m.nchan2 = 2;  // (W_y1, W_y2) shared between blocks
  m.coupling = [p](double, const Vec& x) {
    Mat lx(2, 2);
    lx << p.i11 * x[0] + p.l11, p.i12 * x[0] + p.l12,  //
        p.i21 * x[1] + p.l21, p.i22 * x[1] + p.l22;
    return lx;
  };
  m.obs_forcing = [p](double t, const Vec& x) {
    const double quad = p.m + p.m1 * x[0] + p.m2 * x[1];
    Vec f(2);
    f << p.a1 * x[0] - p.c1 * x[0] * x[0] * x[0] - x[1] * quad + p.fx1_base,
        -p.c2 * x[1] + x[0] * quad +
            sinusoid(p.fx2_base, p.fx2_amp, p.fx2_period, t);
    return f;
  };
  m.feedback = [p](double, const Vec&) {
    Mat ly(2, 2);
    ly << -p.gamma1 / p.eps, p.n, -p.n, -p.gamma2 / p.eps;
    return ly;
  };
  m.hidden_forcing = [p](double, const Vec& x) {
    Vec f(2);
    f << -p.l11 * x[0] - p.l21 * x[1] - p.i11 * x[0] * x[0] -
             p.i21 * x[1] * x[1] + p.fy1,
        -p.l12 * x[0] - p.l22 * x[1] - p.i12 * x[0] * x[0] -
            p.i22 * x[1] * x[1] + p.fy2;
    return f;
  };
  m.obs_noise_1 = [p](double, const Vec&) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = p.sigma_x1;
    s(1, 1) = p.sigma_x2;
    return s;
  };
  m.obs_noise_2 = [p](double, const Vec& x) {
    Mat s(2, 2);
    s << p.sigma_y1 / p.gamma1 * (p.l11 - p.i11 * x[0]),
        p.sigma_y2 / p.gamma2 * (p.l12 - p.i12 * x[0]),
        p.sigma_y1 / p.gamma1 * (p.l21 - p.i21 * x[1]),
        p.sigma_y2 / p.gamma2 * (p.l22 - p.i22 * x[1]);
    return s;
  };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(2, 2); };
  m.hidden_noise_2 = [p](double, const Vec&) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = p.sigma_y1 / std::sqrt(p.eps);
    s(1, 1) = p.sigma_y2 / std::sqrt(p.eps);
    return s;
  };
  return m;
}

CgnsModel lorenz84_model(const Lorenz84Params& p) {
  require(p.a > 0.0 && p.a < 1.0, "zonal damping must be in (0,1)");
  require(p.sigma_x > 0.0 && p.sigma_y > 0.0 && p.sigma_z > 0.0,
          "noise amplitudes must be positive");

  CgnsModel m;
  m.name = "lorenz84";
  m.obs_dim = 2;  // (y, z)
  m.hidden_dim = 1;
  m.nchan1 = 2;  // (W_y, W_z)
  m.nchan2 = 1;  // W_x
  m.coupling = [p](double, const Vec& x) {
    Mat lx(2, 1);
    lx << x[0] - p.b * x[1],  // y equation: x(y - b z)
        p.b * x[0] + x[1];    // z equation: x(b y + z)
    return lx;
  };
  m.obs_forcing = [p](double, const Vec& x) {
    Vec f(2);
    f << -x[0] + p.g, -x[1];
    return f;
  };
  m.feedback = [p](double, const Vec&) {
    Mat ly(1, 1);
    ly << -p.a;
    return ly;
  };
  m.hidden_forcing = [p](double t, const Vec& x) {
    Vec f(1);
    f << -x[0] * x[0] - x[1] * x[1] +
             p.a * (p.f_base + p.f_amp * std::cos(2.0 * M_PI * t / p.f_period));
    return f;
  };
  m.obs_noise_1 = [p](double, const Vec&) {
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = p.sigma_y;
    s(1, 1) = p.sigma_z;
    return s;
  };
  m.obs_noise_2 = [](double, const Vec&) { return Mat::Zero(2, 1); };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(1, 2); };
  m.hidden_noise_2 = [p](double, const Vec&) {
    Mat s(1, 1);
    s << p.sigma_x;
    return s;
  };
  return m;
}

CgnsModel reduced_linear_model(const ReducedLinearParams& p) {
  require(p.lambda_x != 0.0, "coupling must be nonzero");
  require(p.lambda_y < 0.0, "feedback rate must be negative");
  require(p.sigma_x > 0.0 && p.sigma_y > 0.0,
          "noise amplitudes must be positive");

  CgnsModel m;
  m.name = "reduced-linear";
  m.obs_dim = 1;
  m.hidden_dim = 1;
  m.nchan1 = 1;
  m.nchan2 = 1;
  m.coupling = [p](double, const Vec&) {
    Mat lx(1, 1);
    lx << p.lambda_x;
    return lx;
  };
  m.obs_forcing = [p](double t, const Vec&) {
    Vec f(1);
    f << sinusoid(p.fx_base, p.fx_amp, p.fx_period, t);
    return f;
  };
  m.feedback = [p](double, const Vec&) {
    Mat ly(1, 1);
    ly << p.lambda_y;
    return ly;
  };
  m.hidden_forcing = [p](double t, const Vec&) {
    Vec f(1);
    f << sinusoid(p.fy_base, p.fy_amp, p.fy_period, t);
    return f;
  };
  m.obs_noise_1 = [p](double, const Vec&) {
    Mat s(1, 1);
    s << p.sigma_x;
    return s;
  };
  m.obs_noise_2 = [](double, const Vec&) { return Mat::Zero(1, 1); };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(1, 1); };
  m.hidden_noise_2 = [p](double, const Vec&) {
    Mat s(1, 1);
    s << p.sigma_y;
    return s;
  };
  return m;
}

EquilibriumStats equilibrium_stats(const ReducedLinearParams& p) {
  require(p.lambda_x != 0.0, "coupling must be nonzero");
  require(p.lambda_y < 0.0, "feedback rate must be negative");
  require(p.sigma_x > 0.0 && p.sigma_y > 0.0,
          "noise amplitudes must be positive");

  const double lx2 = p.lambda_x * p.lambda_x;
  const double psi = p.lambda_y * p.lambda_y * p.sigma_x * p.sigma_x +
                     lx2 * p.sigma_y * p.sigma_y;
  const double sqrt_psi = std::sqrt(psi);

  EquilibriumStats s;
  s.filter_var =
      (p.lambda_y * p.sigma_x * p.sigma_x + p.sigma_x * sqrt_psi) / lx2;
  if (s.filter_var <= 0.0)
    throw Error("equilibrium filter variance not positive; invalid regime");
  s.gain = sqrt_psi * (sqrt_psi + p.lambda_y * p.sigma_x) /
           (lx2 * s.filter_var);
  // Stationary Sylvester balance: 2 * gain * smoother_var = sigma_y^2, with
  // gain = lambda_y + sigma_y^2 / filter_var (= sqrt(psi) / sigma_x).
  s.smoother_var = p.sigma_y * p.sigma_y / (2.0 * s.gain);
  return s;
}

}  // namespace aci
