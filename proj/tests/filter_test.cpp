#include "aci/filter.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "aci/oracle.hpp"
#include "aci/presets.hpp"

namespace {

// One observed coordinate over two hidden ones, with a Wiener channel shared
// between the blocks so the observation and process noises are correlated.
aci::CgnsModel two_hidden_model() {
  aci::CgnsModel m;
  m.obs_dim = 1;
  m.hidden_dim = 2;
  m.nchan1 = 1;
  m.nchan2 = 2;
  m.coupling = [](double, const aci::Vec&) {
    aci::Mat lx(1, 2);
    lx << 0.8, -0.3;
    return lx;
  };
  m.obs_forcing = [](double t, const aci::Vec&) {
    return aci::Vec::Constant(1, 0.1 * std::sin(t));
  };
  m.feedback = [](double, const aci::Vec&) {
    aci::Mat ly(2, 2);
    ly << -1.2, 0.4, -0.2, -0.9;
    return ly;
  };
  m.hidden_forcing = [](double, const aci::Vec&) {
    aci::Vec f(2);
    f << 0.05, -0.1;
    return f;
  };
  m.obs_noise_1 = [](double, const aci::Vec&) {
    return aci::Mat::Constant(1, 1, 0.5);
  };
  m.obs_noise_2 = [](double, const aci::Vec&) {
    aci::Mat o(1, 2);
    o << 0.2, 0.1;
    return o;
  };
  m.hidden_noise_1 = [](double, const aci::Vec&) {
    aci::Mat h(2, 1);
    h << 0.1, 0.05;
    return h;
  };
  m.hidden_noise_2 = [](double, const aci::Vec&) {
    aci::Mat h(2, 2);
    h << 0.6, 0.0, 0.1, 0.7;
    return h;
  };
  m.name = "two-hidden";
  return m;
}

aci::Trajectory simulate_two_hidden(double t_end, double dt,
                                    std::uint64_t seed) {
  aci::SimulateOptions opt;
  opt.x0 = aci::Vec::Zero(1);
  opt.y0 = aci::Vec::Zero(2);
  opt.t_end = t_end;
  opt.dt = dt;
  opt.seed = seed;
  return aci::simulate(two_hidden_model(), opt);
}

// Hand-built two-row trajectory: exactly one filter step from a chosen state.
aci::Trajectory one_step_path(double t0, double dt, double x0, double z) {
  aci::Trajectory tr;
  tr.t0 = t0;
  tr.dt = dt;
  tr.obs_dim = 1;
  tr.hidden_dim = 0;
  tr.state.resize(2, 1);
  tr.state << x0, x0 + z;
  tr.model_name = "two-hidden";
  return tr;
}

aci::GaussianState generic_init() {
  aci::Vec mu(2);
  mu << 0.2, -0.1;
  aci::Mat r(2, 2);
  r << 0.4, 0.1, 0.1, 0.3;
  return {mu, r};
}

double max_gauss_dev(const std::vector<aci::GaussianState>& a,
                     const std::vector<aci::GaussianState>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    worst = std::max(worst, (a[j].mean - b[j].mean).cwiseAbs().maxCoeff());
    worst = std::max(worst, (a[j].cov - b[j].cov).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("filter matches the pairwise-joint Kalman oracle on correlated noise") {
  const auto m = two_hidden_model();
  const auto tr = simulate_two_hidden(2.0, 1e-3, 31);
  const aci::Vec x0 = tr.state.row(0).head(1).transpose();
  const auto init = aci::default_filter_init(m, tr.t0, x0);

  aci::FilterOptions opt;
  opt.init = init;
  const auto fs = aci::run_filter(m, tr, opt);
  const auto ref = aci::oracle::kalman_rts(m, tr, init);

  REQUIRE(fs.state.size() == ref.filtered.size());
  CHECK(max_gauss_dev(fs.state, ref.filtered) < 1e-10);

  std::vector<aci::GaussianState> boundary;
  for (int j = 0; j < fs.steps(); ++j) boundary.push_back(fs.boundary(j));
  CHECK(max_gauss_dev(boundary, ref.posterior) < 1e-10);
}

TEST_CASE("reduced-pair filter variance settles on the Riccati fixed point") {
  const aci::ReducedLinearParams p;  // unit rates and noises
  const auto m = aci::reduced_linear_model(p);
  aci::SimulateOptions sopt;
  sopt.x0 = aci::Vec::Zero(1);
  sopt.y0 = aci::Vec::Zero(1);
  sopt.t_end = 20.0;
  sopt.dt = 1e-3;
  sopt.seed = 3;
  const auto tr = aci::simulate(m, sopt);
  const auto fs = aci::run_filter(m, tr);
  const double expected = aci::equilibrium_stats(p).filter_var;
  CHECK(fs.state.back().cov(0, 0) ==
        doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("default initial law scales with the stationary variance estimate") {
  const auto m = aci::reduced_linear_model(aci::ReducedLinearParams{});
  const auto init = aci::default_filter_init(m, 0.0, aci::Vec::Zero(1));
  CHECK(init.mean(0) == 0.0);
  // sigma_y^2 / (2 |lambda_y|) = 1 / 2.
  CHECK(init.cov(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  auto flat = two_hidden_model();
  flat.feedback = [](double, const aci::Vec&) { return aci::Mat::Zero(2, 2); };
  const auto fallback = aci::default_filter_init(flat, 0.0, aci::Vec::Zero(1));
  CHECK(fallback.cov(0, 0) == 1.0);
  CHECK(fallback.cov(1, 1) == 1.0);
}

TEST_CASE("observation subsets demand a decoupled noise Gram") {
  aci::CgnsModel m = two_hidden_model();
  m.obs_dim = 2;
  m.coupling = [](double, const aci::Vec&) {
    aci::Mat lx(2, 2);
    lx << 0.8, -0.3, 0.1, 0.5;
    return lx;
  };
  m.obs_forcing = [](double, const aci::Vec&) { return aci::Vec::Zero(2); };
  // One shared channel loads both observed rows: the Gram couples them.
  m.obs_noise_1 = [](double, const aci::Vec&) {
    aci::Mat o(2, 1);
    o << 1.0, 0.5;
    return o;
  };
  m.obs_noise_2 = [](double, const aci::Vec&) {
    aci::Mat o(2, 2);
    o << 0.2, 0.1, 0.0, 0.3;
    return o;
  };
  m.name = "coupled-rows";

  aci::Trajectory tr;
  tr.t0 = 0.0;
  tr.dt = 1e-3;
  tr.obs_dim = 2;
  tr.state = aci::Mat::Zero(3, 2);

  aci::FilterOptions opt;
  opt.active_rows = {0};
  CHECK_THROWS_WITH_AS(aci::run_filter(m, tr, opt),
                       doctest::Contains("large-noise"), aci::Error);

  aci::FilterOptions bad;
  bad.active_rows = {0, 5};
  CHECK_THROWS_AS(aci::run_filter(m, tr, bad), aci::Error);
}

TEST_CASE("vanishing observation noise is diagnosed, not inverted") {
  auto m = two_hidden_model();
  m.obs_noise_1 = [](double, const aci::Vec&) { return aci::Mat::Zero(1, 1); };
  m.obs_noise_2 = [](double, const aci::Vec&) { return aci::Mat::Zero(1, 2); };
  aci::Trajectory tr = one_step_path(0.0, 1e-3, 0.0, 0.01);
  aci::FilterOptions opt;
  opt.init = generic_init();
  CHECK_THROWS_WITH_AS(aci::run_filter(m, tr, opt),
                       doctest::Contains("Gram"), aci::Error);
}

TEST_CASE("innovation and measurement update obey their defining identities") {
  const auto m = two_hidden_model();
  const double dt = 1e-3, t0 = 0.3, x0 = 0.7, z = 0.01;
  aci::FilterOptions opt;
  opt.init = generic_init();
  const auto fs = aci::run_filter(m, one_step_path(t0, dt, x0, z), opt);
  REQUIRE(fs.steps() == 1);

  const aci::Vec xv = aci::Vec::Constant(1, x0);
  const aci::Mat lx = m.coupling(t0, xv);
  const double nu_hand =
      z - (lx * opt.init.mean + m.obs_forcing(t0, xv))(0) * dt;
  CHECK(fs.step[0].innovation(0) == doctest::Approx(nu_hand).epsilon(1e-12));

  const auto post = fs.boundary(0);
  CHECK((post.mean - (opt.init.mean + fs.step[0].update_incr))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK((post.cov - (opt.init.cov - fs.step[0].update_cov_decr))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  // The measurement update can only tighten the assessment.
  Eigen::SelfAdjointEigenSolver<aci::Mat> es(fs.step[0].update_cov_decr);
  CHECK(es.eigenvalues().minCoeff() >= -1e-14);
}

TEST_CASE("first-order gain diagnostics converge to the exact gains") {
  // e expands the exact backward gain C with an O(dt^2) defect.  f expands
  // the innovation gain G - C(AG + J) of the one-step-lag mean update only
  // to O(dt): the dt coefficients of the two differ by exactly
  // (feedback - J coupling) R coupling^T gram_inv.  Shrinking dt tenfold
  // must therefore cut the e gap a hundredfold, the raw f gap tenfold, and
  // the f gap with the known linear term removed a hundredfold.
  const auto m = two_hidden_model();
  const double t0 = 0.3, x0 = 0.7;

  struct Gaps {
    double e = 0.0;
    double f = 0.0;
    double f_resid = 0.0;
  };
  auto gaps = [&](double dt) {
    aci::FilterOptions opt;
    opt.init = generic_init();
    opt.cache_diagnostics = true;
    const auto fs = aci::run_filter(m, one_step_path(t0, dt, x0, 0.01), opt);
    const auto& st = fs.step[0];
    REQUIRE(st.aux != nullptr);

    const aci::Vec xv = aci::Vec::Constant(1, x0);
    const aci::Mat lx = m.coupling(t0, xv);
    const aci::Mat r = opt.init.cov;
    const aci::Mat cyx =
        aci::noise_gram(m.hidden_noise_1(t0, xv), m.hidden_noise_2(t0, xv),
                        m.obs_noise_1(t0, xv), m.obs_noise_2(t0, xv));
    const aci::Mat sxx =
        aci::noise_gram(m.obs_noise_1(t0, xv), m.obs_noise_2(t0, xv),
                        m.obs_noise_1(t0, xv), m.obs_noise_2(t0, xv));

    const aci::Mat g =
        st.innovation_cov.llt().solve(lx * r * dt).transpose();
    const aci::Mat j_gain = sxx.llt().solve(cyx.transpose()).transpose();
    const aci::Mat a_dec = aci::Mat::Identity(2, 2) +
                           m.feedback(t0, xv) * dt - j_gain * lx * dt;
    const aci::Mat f_ref = g - st.smoother_gain * (a_dec * g + j_gain);
    const aci::Mat f_lin = (m.feedback(t0, xv) - j_gain * lx) * r *
                           sxx.llt().solve(lx).transpose() * dt;

    Gaps out;
    out.e = (st.aux->e - st.smoother_gain).cwiseAbs().maxCoeff();
    out.f = (st.aux->f - f_ref).cwiseAbs().maxCoeff();
    out.f_resid = (st.aux->f - f_ref - f_lin).cwiseAbs().maxCoeff();
    return out;
  };

  const auto coarse = gaps(1e-3);
  const auto fine = gaps(1e-4);
  CHECK(coarse.e / fine.e > 50.0);
  CHECK(coarse.e / fine.e < 200.0);
  CHECK(coarse.f / fine.f > 5.0);
  CHECK(coarse.f / fine.f < 20.0);
  CHECK(coarse.f_resid / fine.f_resid > 50.0);
  CHECK(coarse.f_resid / fine.f_resid < 200.0);
  CHECK(fine.e < 1e-5);
  CHECK(fine.f < 5e-4);
  CHECK(fine.f_resid < 1e-5);
}

TEST_CASE("first-order Gram inverse is zero-padded over neutralized rows") {
  aci::CgnsModel m = two_hidden_model();
  m.obs_dim = 2;
  m.coupling = [](double, const aci::Vec&) {
    aci::Mat lx(2, 2);
    lx << 0.8, -0.3, 0.1, 0.5;
    return lx;
  };
  m.obs_forcing = [](double, const aci::Vec&) { return aci::Vec::Zero(2); };
  m.obs_noise_1 = [](double, const aci::Vec&) {
    aci::Mat o(2, 1);
    o << 0.5, 0.0;
    return o;
  };
  m.obs_noise_2 = [](double, const aci::Vec&) {
    aci::Mat o(2, 2);
    o << 0.0, 0.0, 0.0, 0.4;
    return o;
  };
  m.hidden_noise_2 = [](double, const aci::Vec&) {
    aci::Mat h(2, 2);
    h << 0.6, 0.0, 0.1, 0.0;
    return h;
  };
  m.name = "decoupled-rows";

  aci::Trajectory tr;
  tr.t0 = 0.0;
  tr.dt = 1e-3;
  tr.obs_dim = 2;
  tr.state = aci::Mat::Zero(2, 2);

  aci::FilterOptions opt;
  opt.init = generic_init();
  opt.active_rows = {0};
  opt.cache_diagnostics = true;
  const auto fs = aci::run_filter(m, tr, opt);
  const auto& gi = fs.step[0].aux->gram_inv;
  CHECK(gi(0, 0) == doctest::Approx(1.0 / 0.25).epsilon(1e-12));
  CHECK(gi(0, 1) == 0.0);
  CHECK(gi(1, 0) == 0.0);
  CHECK(gi(1, 1) == 0.0);
}

TEST_CASE("filter CSV export writes one row per grid index") {
  const auto m = two_hidden_model();
  const auto tr = simulate_two_hidden(0.05, 1e-3, 8);
  const auto fs = aci::run_filter(m, tr);

  const auto dir =
      std::filesystem::temp_directory_path() / "aci-tests" / "filter-csv";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "filter.csv").string();
  aci::write_filter_csv(fs, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,mu_0,mu_1,R_00,R_01,R_11");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == fs.steps() + 1);
}
