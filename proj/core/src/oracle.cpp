#include "aci/oracle.hpp"

#include <fmt/format.h>

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace aci {
namespace oracle {

LinearStepModel discrete_step_model(const CgnsModel& m, double t, const Vec& x,
                                    double dt) {
  LinearStepModel s;
  const Mat ly = m.feedback(t, x);
  s.a = Mat::Identity(m.hidden_dim, m.hidden_dim) + ly * dt;
  s.u = m.hidden_forcing(t, x) * dt;
  s.h = m.coupling(t, x) * dt;
  s.c = m.obs_forcing(t, x) * dt;
  const Mat s1x = m.obs_noise_1(t, x);
  const Mat s2x = m.obs_noise_2(t, x);
  const Mat s1y = m.hidden_noise_1(t, x);
  const Mat s2y = m.hidden_noise_2(t, x);
  s.q = noise_gram(s1y, s2y, s1y, s2y) * dt;
  s.rv = noise_gram(s1x, s2x, s1x, s2x) * dt;
  s.s = noise_gram(s1y, s2y, s1x, s2x) * dt;
  return s;
}

KalmanRtsResult kalman_rts(const std::vector<LinearStepModel>& steps,
                           const std::vector<Vec>& z,
                           const GaussianState& init) {
  if (steps.size() != z.size())
    throw Error("oracle: step models and increments length mismatch");
  const int n = static_cast<int>(steps.size());

  KalmanRtsResult out;
  out.filtered.resize(n + 1);
  out.posterior.resize(n);
  out.smoothed.resize(n + 1);
  std::vector<Mat> cross(n);  // Cov(y_j, y_{j+1} | z_0..z_j)

  out.filtered[0] = init;
  for (int j = 0; j < n; ++j) {
    const LinearStepModel& sm = steps[j];
    const Vec& mu = out.filtered[j].mean;
    const Mat& p = out.filtered[j].cov;

    const Vec pred_mean = sm.a * mu + sm.u;
    Mat pred_cov = sm.a * p * sm.a.transpose() + sm.q;
    symmetrize(pred_cov);

    const Mat cov_jz = p * sm.h.transpose();
    const Mat cov_nz = sm.a * cov_jz + sm.s;
    Mat var_z = sm.h * cov_jz + sm.rv;
    symmetrize(var_z);
    Eigen::LLT<Mat> llt{var_z};
    if (llt.info() != Eigen::Success)
      throw Error(fmt::format(
          "oracle: increment covariance not positive definite at step {}", j));

    const Vec innov = z[j] - sm.h * mu - sm.c;
    const Mat k_j = llt.solve(cov_jz.transpose()).transpose();
    const Mat k_n = llt.solve(cov_nz.transpose()).transpose();

    GaussianState& post = out.posterior[j];
    post.mean = mu + k_j * innov;
    post.cov = p - k_j * var_z * k_j.transpose();
    symmetrize(post.cov);

    GaussianState& next = out.filtered[j + 1];
    next.mean = pred_mean + k_n * innov;
    next.cov = pred_cov - k_n * var_z * k_n.transpose();
    symmetrize(next.cov);

    cross[j] = p * sm.a.transpose() - k_j * var_z * k_n.transpose();
  }

  out.smoothed[n] = out.filtered[n];
  for (int j = n - 1; j >= 0; --j) {
    const Mat& pf = out.filtered[j + 1].cov;
    Eigen::LLT<Mat> llt{pf};
    if (llt.info() != Eigen::Success)
      throw Error(fmt::format(
          "oracle: filtered covariance singular at step {}", j + 1));
    const Mat gain = llt.solve(cross[j].transpose()).transpose();
    GaussianState& s = out.smoothed[j];
    s.mean = out.posterior[j].mean +
             gain * (out.smoothed[j + 1].mean - out.filtered[j + 1].mean);
    s.cov = out.posterior[j].cov +
            gain * (out.smoothed[j + 1].cov - pf) * gain.transpose();
    symmetrize(s.cov);
  }
  return out;
}

KalmanRtsResult kalman_rts(const CgnsModel& m, const Trajectory& traj,
                           const GaussianState& init) {
  const int n = traj.steps();
  std::vector<LinearStepModel> steps;
  std::vector<Vec> z;
  steps.reserve(n);
  z.reserve(n);
  for (int j = 0; j < n; ++j) {
    const Vec x = traj.state.row(j).head(m.obs_dim).transpose();
    const Vec x1 = traj.state.row(j + 1).head(m.obs_dim).transpose();
    steps.push_back(discrete_step_model(m, traj.time(j), x, traj.dt));
    z.push_back(x1 - x);
  }
  return kalman_rts(steps, z, init);
}

namespace {

struct LogPdf {
  Vec mean;
  Eigen::LLT<Mat> llt;
  double norm;  // -0.5 (d log 2 pi + log det cov)

  explicit LogPdf(const GaussianState& g) : mean(g.mean), llt(g.cov) {
    if (llt.info() != Eigen::Success)
      throw Error("oracle: quadrature needs positive definite covariances");
    double logdet = 0.0;
    const Mat l = llt.matrixL();
    for (int i = 0; i < l.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
    norm = -0.5 * (l.rows() * std::log(2.0 * M_PI) + logdet);
  }

  double operator()(const Vec& x) const {
    const Vec w = llt.matrixL().solve(x - mean);
    return norm - 0.5 * w.squaredNorm();
  }
};

}  // namespace

double kl_quadrature(const GaussianState& p, const GaussianState& q,
                     int points_per_dim) {
  const int d = p.dim();
  if (q.dim() != d) throw Error("oracle: dimension mismatch in quadrature");
  if (d != 1 && d != 2)
    throw Error("oracle: quadrature supports dimensions 1 and 2 only");
  if (points_per_dim < 16) throw Error("oracle: quadrature grid too coarse");

  LogPdf lp(p), lq(q);
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    const double sp = std::sqrt(p.cov(i, i));
    const double sq = std::sqrt(q.cov(i, i));
    lo[i] = std::min(p.mean[i] - 9.0 * sp, q.mean[i] - 9.0 * sq);
    hi[i] = std::max(p.mean[i] + 9.0 * sp, q.mean[i] + 9.0 * sq);
  }

  double total = 0.0;
  if (d == 1) {
    const double h = (hi[0] - lo[0]) / (points_per_dim - 1);
    Vec x(1);
    for (int i = 0; i < points_per_dim; ++i) {
      x[0] = lo[0] + i * h;
      const double a = lp(x);
      if (a < -700.0) continue;
      const double w = (i == 0 || i == points_per_dim - 1) ? 0.5 : 1.0;
      total += w * std::exp(a) * (a - lq(x));
    }
    total *= h;
  } else {
    const double h0 = (hi[0] - lo[0]) / (points_per_dim - 1);
    const double h1 = (hi[1] - lo[1]) / (points_per_dim - 1);
    Vec x(2);
    for (int i = 0; i < points_per_dim; ++i) {
      x[0] = lo[0] + i * h0;
      const double wi = (i == 0 || i == points_per_dim - 1) ? 0.5 : 1.0;
      for (int j = 0; j < points_per_dim; ++j) {
        x[1] = lo[1] + j * h1;
        const double a = lp(x);
        if (a < -700.0) continue;
        const double wj = (j == 0 || j == points_per_dim - 1) ? 0.5 : 1.0;
        total += wi * wj * std::exp(a) * (a - lq(x));
      }
    }
    total *= h0 * h1;
  }
  return total;
}

namespace {

std::vector<double> distinct_levels(const std::vector<double>& profile) {
  std::vector<double> v = profile;
  v.push_back(0.0);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double forward_length_exact(const std::vector<double>& profile, double dt_eff,
                            double span) {
  if (profile.empty()) return 0.0;
  const std::vector<double> levels = distinct_levels(profile);
  const double peak = levels.back();
  if (peak <= 0.0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    const double a = levels[i];
    const double b = levels[i + 1];
    int last = -1;
    for (size_t idx = 0; idx < profile.size(); ++idx)
      if (profile[idx] > a) last = static_cast<int>(idx);
    const double tau =
        last < 0 ? 0.0 : std::min((last + 1) * dt_eff, span);
    total += (b - a) * tau;
  }
  return total / peak;
}

double backward_length_exact(const std::vector<double>& profile, double dt_eff,
                             double horizon) {
  if (profile.empty()) return 0.0;
  const std::vector<double> levels = distinct_levels(profile);
  const double peak = levels.back();
  if (peak <= 0.0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    const double a = levels[i];
    const double b = levels[i + 1];
    int last = -1;
    for (size_t idx = 0; idx < profile.size(); ++idx)
      if (profile[idx] <= a) last = static_cast<int>(idx);
    const double tau = last < 0 ? horizon : horizon - last * dt_eff;
    total += (b - a) * tau;
  }
  return total / peak;
}

}  // namespace oracle
}  // namespace aci
