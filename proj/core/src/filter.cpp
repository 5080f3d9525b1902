#include "aci/filter.hpp"

#include <fmt/format.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>

namespace aci {

namespace {

// Relative tolerance for the Gram decoupling check under observation
// subsetting.  Entries are sums of products of user-supplied loadings, so a
// genuinely block-diagonal model produces exact zeros; the tolerance only
// absorbs cancellation noise in models that are diagonal by algebra rather
// than by sparsity.
constexpr double kGramCoupleTol = 1e-9;

std::vector<int> resolve_rows(const std::vector<int>& rows, int k) {
  if (rows.empty()) {
    std::vector<int> all(k);
    for (int i = 0; i < k; ++i) all[i] = i;
    return all;
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= k)
      throw Error(fmt::format("active observation row {} out of range [0, {})",
                              rows[i], k));
    if (i > 0 && rows[i] <= rows[i - 1])
      throw Error("active observation rows must be strictly increasing");
  }
  return rows;
}

Mat take_rows(const Mat& m, const std::vector<int>& rows) {
  Mat out(rows.size(), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

Vec take_elems(const Vec& v, const std::vector<int>& rows) {
  Vec out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

Mat take_block(const Mat& m, const std::vector<int>& r,
               const std::vector<int>& c) {
  Mat out(r.size(), c.size());
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
  return out;
}

void check_gram_decoupled(const Mat& gram, const std::vector<int>& active,
                          int k, double t) {
  std::vector<char> is_active(k, 0);
  for (int a : active) is_active[a] = 1;
  for (int a : active) {
    for (int b = 0; b < k; ++b) {
      if (is_active[b]) continue;
      const double tol =
          kGramCoupleTol * std::sqrt(gram(a, a) * gram(b, b)) + 1e-300;
      if (std::abs(gram(a, b)) > tol)
        throw Error(fmt::format(
            "observation noise Gram couples active row {} with neutralized "
            "row {} at t={:g} (entry {:g}); the infinite-uncertainty limit "
            "for coupled noise is not well defined -- rerun the query in "
            "large-noise conditioning mode",
            a, b, t, gram(a, b)));
    }
  }
}

}  // namespace

GaussianState FilterSeries::boundary(int j) const {
  const FilterStep& s = step.at(j);
  GaussianState g;
  g.mean = state[j].mean + s.update_incr;
  g.cov = state[j].cov - s.update_cov_decr;
  symmetrize(g.cov);
  return g;
}

GaussianState default_filter_init(const CgnsModel& m, double t0,
                                  const Vec& x0) {
  const Mat ly = m.feedback(t0, x0);
  const Mat syy = noise_gram(m.hidden_noise_1(t0, x0), m.hidden_noise_2(t0, x0),
                             m.hidden_noise_1(t0, x0), m.hidden_noise_2(t0, x0));
  GaussianState g;
  g.mean = Vec::Zero(m.hidden_dim);
  g.cov = Mat::Zero(m.hidden_dim, m.hidden_dim);
  for (int i = 0; i < m.hidden_dim; ++i) {
    double v = 1.0;
    if (std::abs(ly(i, i)) > 1e-12) {
      const double est = syy(i, i) / (2.0 * std::abs(ly(i, i)));
      if (est > 0.0) v = est;
    }
    g.cov(i, i) = v;
  }
  return g;
}

FilterSeries run_filter(const CgnsModel& m, const Trajectory& traj,
                        const FilterOptions& opt) {
  m.check();
  if (traj.obs_dim != m.obs_dim)
    throw Error(fmt::format(
        "trajectory has {} observed coordinates but model '{}' expects {}",
        traj.obs_dim, m.name, m.obs_dim));
  const int n_steps = traj.steps();
  if (n_steps < 1) throw Error("trajectory has no increments to filter");

  const int k = m.obs_dim;
  const int l = m.hidden_dim;
  const double dt = traj.dt;
  const std::vector<int> active = resolve_rows(opt.active_rows, k);
  const bool subsetting = static_cast<int>(active.size()) < k;
  const int ka = static_cast<int>(active.size());

  FilterSeries fs;
  fs.t0 = traj.t0;
  fs.dt = dt;
  fs.active_rows = active;
  fs.state.reserve(n_steps + 1);
  fs.step.reserve(n_steps);

  GaussianState cur = opt.init;
  if (cur.mean.size() == 0) {
    cur = default_filter_init(m, traj.t0,
                              traj.state.row(0).head(k).transpose());
  }
  if (cur.mean.size() != l || cur.cov.rows() != l || cur.cov.cols() != l)
    throw Error(fmt::format(
        "filter initial state has dimension {} x {}, expected {}",
        cur.mean.size(), cur.cov.rows(), l));
  symmetrize(cur.cov);
  fs.state.push_back(cur);

  const Mat eye = Mat::Identity(l, l);

  for (int j = 0; j < n_steps; ++j) {
    const double t = traj.time(j);
    const Vec x = traj.state.row(j).head(k).transpose();
    const Vec x_next = traj.state.row(j + 1).head(k).transpose();

    const Mat lx = m.coupling(t, x);
    const Vec fx = m.obs_forcing(t, x);
    const Mat ly = m.feedback(t, x);
    const Vec fy = m.hidden_forcing(t, x);
    const Mat s1x = m.obs_noise_1(t, x);
    const Mat s2x = m.obs_noise_2(t, x);
    const Mat s1y = m.hidden_noise_1(t, x);
    const Mat s2y = m.hidden_noise_2(t, x);

    const Mat sxx = noise_gram(s1x, s2x, s1x, s2x);
    const Mat syy = noise_gram(s1y, s2y, s1y, s2y);
    const Mat cyx = noise_gram(s1y, s2y, s1x, s2x);  // l x k

    if (subsetting) check_gram_decoupled(sxx, active, k, t);

    const Mat& r = cur.cov;
    const Vec& mu = cur.mean;

    FilterStep st;

    // Plain one-step forecast that ignores the step's own observation; the
    // backward influence range uses it as the zero-information reference for
    // the newest time point.
    st.pred_mean = mu + (ly * mu + fy) * dt;
    {
      const Mat a_plain = eye + ly * dt;
      st.pred_cov = a_plain * r * a_plain.transpose() + syy * dt;
      symmetrize(st.pred_cov);
    }

    GaussianState post;
    Mat j_gain;      // cross-noise gain (Sigma^y o Sigma^x)_A (Gram_AA)^{-1}
    Mat lx_a;        // active rows of the coupling
    Mat cyx_cols;    // active columns of the cross Gram, l x |A|
    Vec z_a, fx_a;
    Eigen::LLT<Mat> llt_sx;

    if (ka > 0) {
      lx_a = take_rows(lx, active);
      fx_a = take_elems(fx, active);
      z_a = take_elems(x_next - x, active);
      const Mat sx_aa = take_block(sxx, active, active);
      cyx_cols.resize(l, ka);
      for (int c = 0; c < ka; ++c) cyx_cols.col(c) = cyx.col(active[c]);

      st.innovation = z_a - (lx_a * mu + fx_a) * dt;
      Mat v = (lx_a * r * lx_a.transpose() * dt + sx_aa) * dt;
      symmetrize(v);
      Eigen::LLT<Mat> llt_v(v);
      if (llt_v.info() != Eigen::Success)
        throw Error(fmt::format(
            "innovation covariance not positive definite at step {} (t={:g}); "
            "check the observation noise rows of model '{}'",
            j, t, m.name));
      st.innovation_cov = v;

      const Mat w = lx_a * r * dt;                    // ka x l
      const Mat g = llt_v.solve(w).transpose();       // l x ka
      const Mat gl = g * Mat(llt_v.matrixL());
      st.update_incr = g * st.innovation;
      st.update_cov_decr = gl * gl.transpose();
      symmetrize(st.update_cov_decr);

      post.mean = mu + st.update_incr;
      post.cov = r - st.update_cov_decr;
      enforce_psd(post.cov, opt.psd_rel_tol);

      llt_sx.compute(sx_aa);
      if (llt_sx.info() != Eigen::Success)
        throw Error(fmt::format(
            "observation noise Gram singular at step {} (t={:g}) for model "
            "'{}'; every active observed coordinate needs nondegenerate noise",
            j, t, m.name));
      j_gain = llt_sx.solve(cyx_cols.transpose()).transpose();  // l x ka
    } else {
      st.innovation = Vec(0);
      st.innovation_cov = Mat(0, 0);
      st.update_incr = Vec::Zero(l);
      st.update_cov_decr = Mat::Zero(l, l);
      post = cur;
      j_gain = Mat::Zero(l, 0);
      lx_a = Mat::Zero(0, l);
      z_a = Vec(0);
      fx_a = Vec(0);
    }

    // Decorrelated forward map: with the measurement update factored out, the
    // hidden state evolves by a_dec with independent residual noise q_dec.
    const Mat a_dec = eye + ly * dt - j_gain * lx_a * dt;
    Mat q_dec = syy * dt;
    if (ka > 0) q_dec -= j_gain * cyx_cols.transpose() * dt;
    symmetrize(q_dec);

    GaussianState next;
    next.mean = a_dec * post.mean + fy * dt;
    if (ka > 0) next.mean += j_gain * (z_a - fx_a * dt);
    next.cov = a_dec * post.cov * a_dec.transpose() + q_dec;
    enforce_psd(next.cov, opt.psd_rel_tol);

    Eigen::LLT<Mat> llt_next(next.cov);
    if (llt_next.info() != Eigen::Success)
      throw Error(fmt::format(
          "filter covariance lost positive definiteness at step {} (t={:g}) "
          "for model '{}'",
          j + 1, t + dt, m.name));
    st.smoother_gain =
        llt_next.solve(a_dec * post.cov).transpose();  // post.cov a_dec^T next^-1

    if (opt.cache_diagnostics) {
      Eigen::LLT<Mat> llt_r{Mat(r)};
      if (llt_r.info() != Eigen::Success)
        throw Error(fmt::format(
            "filter covariance singular at step {} (t={:g}); diagnostics need "
            "an invertible covariance",
            j, t));
      const Mat r_inv = llt_r.solve(eye);
      auto aux = std::make_unique<AuxFirstOrder>();
      aux->gram_inv = Mat::Zero(k, k);
      if (ka > 0) {
        const Mat sx_inv = llt_sx.solve(Mat::Identity(ka, ka));
        for (int a = 0; a < ka; ++a)
          for (int b = 0; b < ka; ++b)
            aux->gram_inv(active[a], active[b]) = sx_inv(a, b);
      }
      aux->gx = lx + cyx.transpose() * r_inv;  // k x l
      aux->gy = ly + syy * r_inv;
      aux->h = r_inv * (ly * r + r * ly.transpose() + syy);
      aux->k = aux->gram_inv * aux->gx;
      aux->e = eye + (cyx * aux->k - aux->gy) * dt;
      const Mat krk = aux->k * r * aux->k.transpose();  // k x k
      aux->f = -r * (aux->k.transpose() +
                     (aux->gx.transpose() * krk -
                      r_inv * aux->h.transpose() * r * aux->k.transpose() +
                      ly.transpose() * aux->k.transpose()) *
                         dt -
                     lx.transpose() * (aux->gram_inv + krk * dt));
      st.aux = std::move(aux);
    }

    fs.step.push_back(std::move(st));
    fs.state.push_back(next);
    cur = std::move(next);
  }
  return fs;
}

void write_filter_csv(const FilterSeries& fs, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  const int l = fs.state.empty() ? 0 : static_cast<int>(fs.state[0].mean.size());
  std::fputs("t", f);
  for (int i = 0; i < l; ++i) std::fprintf(f, ",mu_%d", i);
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j) std::fprintf(f, ",R_%d%d", i, j);
  std::fputc('\n', f);
  for (size_t n = 0; n < fs.state.size(); ++n) {
    std::fprintf(f, "%.12g", fs.time(static_cast<int>(n)));
    for (int i = 0; i < l; ++i)
      std::fprintf(f, ",%.12g", fs.state[n].mean[i]);
    for (int i = 0; i < l; ++i)
      for (int j = i; j < l; ++j)
        std::fprintf(f, ",%.12g", fs.state[n].cov(i, j));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

}  // namespace aci
