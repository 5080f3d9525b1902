#include "aci/smoother.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "aci/oracle.hpp"
#include "aci/presets.hpp"

namespace {

// Same correlated-noise pair of hidden modes used by the filter tests.
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

aci::Trajectory simulate_model(const aci::CgnsModel& m, double t_end,
                               double dt, std::uint64_t seed) {
  aci::SimulateOptions opt;
  opt.x0 = aci::Vec::Zero(m.obs_dim);
  opt.y0 = aci::Vec::Zero(m.hidden_dim);
  opt.t_end = t_end;
  opt.dt = dt;
  opt.seed = seed;
  return aci::simulate(m, opt);
}

aci::Trajectory reduced_path(double t_end, std::uint64_t seed) {
  return simulate_model(aci::reduced_linear_model(aci::ReducedLinearParams{}),
                        t_end, 1e-3, seed);
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

// Least-squares slope of log(values) against the sample index.
double log_slope(const std::vector<double>& values, int first, int last) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = first; i < last; ++i) {
    REQUIRE(values[i] > 0.0);
    const double x = i, y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("complete smoother matches the Rauch-Tung-Striebel oracle") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 0.5, 1e-3, 17);
  const auto init = aci::default_filter_init(m, tr.t0, aci::Vec::Zero(1));
  aci::FilterOptions fopt;
  fopt.init = init;
  const auto fs = aci::run_filter(m, tr, fopt);

  // lag_tol 1e-300 disables freezing: every anchor stays live to the end.
  const auto mine = aci::complete_smoother(fs, 2 * fs.steps(), 1e-300);
  const auto ref = aci::oracle::kalman_rts(m, tr, init);
  CHECK(max_gauss_dev(mine, ref.smoothed) < 1e-8);
}

TEST_CASE("tolerance freezing changes results below the tolerance only") {
  // A stiff reduced pair: gain products contract at rate
  // sqrt(lambda_y^2 sigma_x^2 + lambda_x^2 sigma_y^2) / sigma_x = sqrt(18)
  // per unit time, so the default tolerance of 1e-6 freezes anchors after
  // about 3.3k of the 5k steps.
  aci::ReducedLinearParams p;
  p.lambda_y = -3.0;
  p.sigma_y = 3.0;
  const auto m = aci::reduced_linear_model(p);
  const auto tr = simulate_model(m, 5.0, 1e-3, 19);
  const auto fs = aci::run_filter(m, tr);
  const auto frozen = aci::complete_smoother(fs);  // lag_tol 1e-6
  const auto live = aci::complete_smoother(fs, 2 * fs.steps(), 1e-300);
  CHECK(max_gauss_dev(frozen, live) < 1e-4);
  CHECK(max_gauss_dev(frozen, live) > 0.0);  // freezing did engage
}

TEST_CASE("the batch wrapper and an explicitly driven smoother agree") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 1.0, 1e-3, 23);
  const auto fs = aci::run_filter(m, tr);

  aci::OnlineSmoother sm(fs);
  sm.run();
  CHECK(sm.current() == fs.steps());
  CHECK(sm.total_steps() == fs.steps());
  const auto batch = aci::complete_smoother(fs);
  CHECK(max_gauss_dev(sm.complete(), batch) < 1e-14);
}

TEST_CASE("lagged assessments depend only on the data seen so far") {
  const auto m = two_hidden_model();
  const auto full = simulate_model(m, 1.0, 1e-3, 29);
  const int n_partial = 200;

  aci::Trajectory prefix = full;
  prefix.state.conservativeResize(n_partial + 1, Eigen::NoChange);

  const auto fs_full = aci::run_filter(m, full);
  const auto fs_prefix = aci::run_filter(m, prefix);

  aci::OnlineSmoother sm(fs_full);
  for (int n = 0; n < n_partial; ++n) sm.advance();
  CHECK(sm.current() == n_partial);

  const auto done = aci::complete_smoother(fs_prefix);
  for (int j : {0, 57, 150, n_partial}) {
    const auto live = sm.lagged(j);
    CHECK((live.mean - done[j].mean).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((live.cov - done[j].cov).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("the lag cap freezes old anchors and marks them truncated") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 0.3, 1e-3, 37);
  const auto fs = aci::run_filter(m, tr);
  const int n = fs.steps();

  aci::SmootherOptions opt;
  opt.lag_cap = 40;
  opt.lag_tol = 1e-300;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  for (int j = 0; j <= n - 41; j += 17) {
    CHECK(sm.freeze_step()[j] == j + 40);
    CHECK(sm.capped()[j] == 1);
  }
  for (int j = n - 39; j <= n; j += 13) {
    CHECK(sm.freeze_step()[j] == n);
    CHECK(sm.capped()[j] == 0);
  }

  const auto ranges = aci::forward_ranges(sm, {0, n - 5});
  REQUIRE(ranges.size() == 2);
  CHECK(ranges[0].truncated);
  CHECK(!ranges[1].truncated);
}

TEST_CASE("accumulated gain products decay with lag until anchors freeze") {
  const auto fs = aci::run_filter(
      aci::reduced_linear_model(aci::ReducedLinearParams{}),
      reduced_path(10.0, 41));

  aci::SmootherOptions opt;
  opt.lag_cap = 20000;  // keep the cap out of the way of the tolerance
  aci::OnlineSmoother sm(fs, opt);
  for (int i = 0; i < 5000; ++i) sm.advance();
  const auto bank = sm.bank();
  REQUIRE(bank.size() > 100);
  // The oldest live anchor has accumulated far more contraction than a
  // recent one.
  CHECK(bank.front().d.norm() < 0.01 * bank.back().d.norm());
  CHECK(bank.front().j < bank.back().j);

  sm.run();
  // Gain products contract at rate sqrt(2) per unit time, so the norm
  // tolerance of 1e-6 is crossed after roughly ln(1e6)/(sqrt(2) dt), about
  // 9.7k of the 10k steps.
  CHECK(sm.freeze_step()[0] > 9400);
  CHECK(sm.freeze_step()[0] < 9995);
  CHECK(sm.capped()[0] == 0);
}

TEST_CASE("backward revisions decay at twice the equilibrium gain rate") {
  const aci::ReducedLinearParams p;
  const auto fs =
      aci::run_filter(aci::reduced_linear_model(p), reduced_path(30.0, 43));
  const int n = fs.steps();

  aci::SmootherOptions opt;
  opt.analysis_stride = n;  // evaluate the backward profile only at the end
  opt.keep_profiles = true;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  REQUIRE(!sm.backward().empty());
  const auto& bp = sm.backward().back();
  REQUIRE(bp.n == n);
  REQUIRE(static_cast<int>(bp.beta.size()) == n + 1);

  // Between the frozen zone and the endpoint the profile is a clean
  // exponential: log beta_j grows like 2 * gain * dt per step.
  const double slope = log_slope(bp.beta, n - 1500, n - 300);
  const double expected = 2.0 * aci::equilibrium_stats(p).gain * fs.dt;
  CHECK(slope == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("forward profile heads equal the assimilative divergence") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 1.0, 1e-3, 47);
  const auto fs = aci::run_filter(m, tr);

  aci::SmootherOptions opt;
  opt.keep_profiles = true;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  const std::vector<int> anchors{0, 100, 500};
  const auto ranges = aci::forward_ranges(sm, anchors);
  REQUIRE(ranges.size() == anchors.size());
  for (size_t i = 0; i < anchors.size(); ++i) {
    const int j = anchors[i];
    const auto direct =
        aci::gauss_relative_entropy(sm.complete()[j], fs.state[j]);
    CHECK(std::abs(ranges[i].aci.total() - direct.total()) < 1e-12);
    REQUIRE(!ranges[i].profile.empty());
    CHECK(ranges[i].profile.front() ==
          doctest::Approx(direct.total()).epsilon(1e-12));
    CHECK(ranges[i].peak >= ranges[i].profile.front() - 1e-15);
  }
}

TEST_CASE("marginalized profiles divide the evidence between cause blocks") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 0.6, 1e-3, 53);
  const auto fs = aci::run_filter(m, tr);

  auto head_for = [&](const std::vector<int>& cause) {
    aci::SmootherOptions opt;
    opt.cause_indices = cause;
    aci::OnlineSmoother sm(fs, opt);
    sm.run();
    const auto ranges = aci::forward_ranges(sm, {150});
    REQUIRE(ranges.size() == 1);
    const auto direct = aci::gauss_relative_entropy(
        aci::marginal_state(sm.complete()[150], cause),
        aci::marginal_state(fs.state[150], cause));
    CHECK(std::abs(ranges[0].aci.total() - direct.total()) < 1e-12);
    return ranges[0].aci.total();
  };

  const double joint = head_for({0, 1});
  const double first = head_for({0});
  const double second = head_for({1});
  // Marginal divergences are dominated by the joint one.
  CHECK(first <= joint + 1e-12);
  CHECK(second <= joint + 1e-12);
}

TEST_CASE("profiles close at zero ahead and are centered at zero behind") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 1.0, 1e-3, 59);
  const auto fs = aci::run_filter(m, tr);
  const int n = fs.steps();

  aci::SmootherOptions opt;
  opt.analysis_stride = 7;  // deliberately not aligned with the run length
  opt.keep_profiles = true;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  std::vector<int> anchors{0, 123, 800, n - 3};
  for (const auto& fr : aci::forward_ranges(sm, anchors)) {
    REQUIRE(!fr.profile.empty());
    CHECK(fr.profile.back() <= 1e-14);
  }
  REQUIRE(!sm.backward().empty());
  for (const auto& bp : sm.backward()) {
    REQUIRE(!bp.beta.empty());
    CHECK(bp.beta.front() == 0.0);
  }
}

TEST_CASE("the backward endpoint weighs the final update against a forecast") {
  const auto fs = aci::run_filter(
      aci::reduced_linear_model(aci::ReducedLinearParams{}),
      reduced_path(10.0, 61));
  const int n = fs.steps();

  aci::SmootherOptions opt;
  opt.analysis_stride = n;
  opt.keep_profiles = true;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  const auto& bp = sm.backward().back();
  // Anchor 0 froze thousands of steps before the end, so the centering
  // offset is exactly zero and the endpoint entry is the raw divergence of
  // the last filter state from its own plain forecast.
  const aci::GaussianState pred{fs.step[n - 1].pred_mean,
                                fs.step[n - 1].pred_cov};
  const double direct =
      aci::gauss_relative_entropy(fs.state[n], pred).total();
  CHECK(bp.beta[0] == 0.0);
  CHECK(bp.beta[n] == doctest::Approx(direct).epsilon(1e-12));
  CHECK(bp.peak >= bp.beta[n] - 1e-15);
  CHECK(bp.sum >= bp.peak);
  CHECK(bp.tau_approx > 0.0);
}

TEST_CASE("exact lengths bracket the norm-ratio lengths from the right sides") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 1.5, 1e-3, 67);
  const auto fs = aci::run_filter(m, tr);

  aci::SmootherOptions opt;
  opt.exact_lengths = true;
  aci::OnlineSmoother sm(fs, opt);
  sm.run();

  for (const auto& bp : sm.backward()) {
    REQUIRE(std::isfinite(bp.tau_exact));
    CHECK(bp.tau_exact <= bp.tau_approx + 1e-9);
  }
  const auto ranges = aci::forward_ranges(sm, {100, 400});
  for (const auto& fr : ranges) {
    REQUIRE(std::isfinite(fr.tau_exact));
    CHECK(fr.tau_exact >= fr.tau_approx - 1e-9);
  }

  aci::OnlineSmoother plain(fs);
  plain.run();
  REQUIRE(!plain.backward().empty());
  CHECK(!std::isfinite(plain.backward().back().tau_exact));
}

TEST_CASE("bank snapshots export the live anchors with their gain norms") {
  const auto m = two_hidden_model();
  const auto tr = simulate_model(m, 0.4, 1e-3, 71);
  const auto fs = aci::run_filter(m, tr);

  aci::OnlineSmoother sm(fs);
  for (int i = 0; i < 250; ++i) sm.advance();

  const auto dir =
      std::filesystem::temp_directory_path() / "aci-tests" / "bank-csv";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "bank.csv").string();
  aci::write_bank_csv(sm, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "j,n,mu_0,mu_1,R_00,R_01,R_11,normD");
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == static_cast<int>(sm.bank().size()));
}
