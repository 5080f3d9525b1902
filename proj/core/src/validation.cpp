#include "aci/validation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "aci/experiment.hpp"
#include "aci/filter.hpp"
#include "aci/oracle.hpp"
#include "aci/presets.hpp"
#include "aci/query.hpp"
#include "aci/smoother.hpp"

namespace aci {

namespace {

namespace fsys = std::filesystem;
using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Vec from_list(const std::vector<double>& v, int n) {
  Vec r = Vec::Zero(n);
  for (int i = 0; i < n && i < static_cast<int>(v.size()); ++i) r[i] = v[i];
  return r;
}

Trajectory simulate_config(const ExperimentConfig& cfg,
                           std::uint64_t seed_override = 0) {
  const CgnsModel model = make_model(cfg.model);
  SimulateOptions s;
  s.x0 = from_list(cfg.x0, model.obs_dim);
  s.y0 = from_list(cfg.y0, model.hidden_dim);
  s.t0 = cfg.t_start;
  s.t_end = cfg.t_end;
  s.dt = cfg.dt;
  s.seed = seed_override ? seed_override : cfg.seed;
  return simulate(model, s);
}

// Constant-coefficient system with one observed and two hidden components and
// correlated process/observation noise through both shared channels.  The
// correlation is the point: the production filter removes it by substitution
// while the batch oracle conditions pairwise, so agreement checks two
// genuinely different derivations.
CgnsModel linear_two_hidden_model() {
  CgnsModel m;
  m.name = "linear-two-hidden";
  m.obs_dim = 1;
  m.hidden_dim = 2;
  m.nchan1 = 1;
  m.nchan2 = 2;

  Mat lx(1, 2);
  lx << 0.8, -0.3;
  Mat ly(2, 2);
  ly << -1.2, 0.4, -0.2, -0.9;
  Mat o1(1, 1);
  o1 << 0.5;
  Mat o2(1, 2);
  o2 << 0.2, 0.1;
  Mat h1(2, 1);
  h1 << 0.1, 0.05;
  Mat h2(2, 2);
  h2 << 0.6, 0.0, 0.1, 0.7;

  m.coupling = [lx](double, const Vec&) { return lx; };
  m.feedback = [ly](double, const Vec&) { return ly; };
  m.obs_forcing = [](double t, const Vec&) {
    return Vec::Constant(1, 0.1 * std::sin(t));
  };
  m.hidden_forcing = [](double, const Vec&) {
    Vec f(2);
    f << 0.05, -0.1;
    return f;
  };
  m.obs_noise_1 = [o1](double, const Vec&) { return o1; };
  m.obs_noise_2 = [o2](double, const Vec&) { return o2; };
  m.hidden_noise_1 = [h1](double, const Vec&) { return h1; };
  m.hidden_noise_2 = [h2](double, const Vec&) { return h2; };
  m.check();
  return m;
}

// Scalar pair whose hidden component never informs the observed one: zero
// coupling and no shared noise channel.
CgnsModel decoupled_model() {
  CgnsModel m;
  m.name = "decoupled";
  m.obs_dim = 1;
  m.hidden_dim = 1;
  m.nchan1 = 1;
  m.nchan2 = 1;
  m.coupling = [](double, const Vec&) { return Mat::Zero(1, 1); };
  m.feedback = [](double, const Vec&) { return Mat::Constant(1, 1, -1.0); };
  m.obs_forcing = [](double, const Vec&) { return Vec::Constant(1, 0.3); };
  m.hidden_forcing = [](double, const Vec&) { return Vec::Constant(1, 0.1); };
  m.obs_noise_1 = [](double, const Vec&) { return Mat::Constant(1, 1, 0.7); };
  m.obs_noise_2 = [](double, const Vec&) { return Mat::Zero(1, 1); };
  m.hidden_noise_1 = [](double, const Vec&) { return Mat::Zero(1, 1); };
  m.hidden_noise_2 = [](double, const Vec&) {
    return Mat::Constant(1, 1, 0.5);
  };
  m.check();
  return m;
}

CriterionResult timed(int id, const char* name, bool gating,
                      const std::function<void(CriterionResult&)>& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.gating = gating;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = fmt::format("exception: {}", e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// 1. Closed-form Gaussian divergence against the quadrature oracle.

void c1_divergence_oracle(CriterionResult& r) {
  std::mt19937 gen(4242);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int dim = (i % 2) + 1;
    auto draw = [&]() {
      GaussianState g;
      g.mean = Vec::NullaryExpr(dim, [&](Eigen::Index) { return 1.2 * nd(gen); });
      Mat a = Mat::NullaryExpr(dim, dim,
                               [&](Eigen::Index, Eigen::Index) {
                                 return 0.6 * nd(gen);
                               });
      g.cov = a * a.transpose() + (0.35 + 0.3 * ud(gen)) * Mat::Identity(dim, dim);
      return g;
    };
    const GaussianState p = draw();
    const GaussianState q = draw();
    const double closed = gauss_relative_entropy(p, q).total();
    const double quad = oracle::kl_quadrature(p, q);
    worst = std::max(worst, std::abs(closed - quad));
  }
  r.passed = worst <= 1e-6;
  r.detail = fmt::format("max |closed - quadrature| = {:.3g} over 50 pairs",
                         worst);
}

// ---------------------------------------------------------------------------
// 2. Equilibrium variances of the reduced linear pair.

void c2_equilibrium(CriterionResult& r) {
  const ReducedLinearParams p;  // lambda_x = 1, lambda_y = -1, unit noise
  const CgnsModel m = reduced_linear_model(p);

  SimulateOptions so;
  so.x0 = Vec::Zero(1);
  so.y0 = Vec::Zero(1);
  so.t0 = 0.0;
  so.t_end = 50.0;
  so.dt = 1e-3;
  so.seed = 7;
  const Trajectory traj = simulate(m, so);

  const FilterSeries fs = run_filter(m, traj, {});
  const double rf = fs.state.back().cov(0, 0);

  const std::vector<GaussianState> sm = complete_smoother(fs);
  const double rs = sm[fs.steps() / 2].cov(0, 0);

  // Frozen stationary references for the unit pair: the Riccati root
  // sqrt(2) - 1 and the Sylvester balance 1 / (2 sqrt(2)).  equilibrium_stats
  // reproduces both in closed form and is pinned in the unit tests.
  const double rf_ref = 0.414214;
  const double rs_ref = 0.353553;
  const double ef = std::abs(rf - rf_ref) / rf_ref;
  const double es = std::abs(rs - rs_ref) / rs_ref;
  r.passed = ef <= 0.01 && es <= 0.01;
  r.detail = fmt::format(
      "filter var {:.6f} (ref {:.6f}, off {:.2f}%), smoother var {:.6f} "
      "(ref {:.6f}, off {:.2f}%)",
      rf, rf_ref, 100 * ef, rs, rs_ref, 100 * es);
}

// ---------------------------------------------------------------------------
// 3. Online smoother against the batch Kalman/RTS oracle.

void c3_smoother_oracle(CriterionResult& r) {
  const CgnsModel m = linear_two_hidden_model();

  SimulateOptions so;
  so.x0 = Vec::Zero(1);
  so.y0 = Vec::Zero(2);
  so.t0 = 0.0;
  so.t_end = 10.0;  // 10^4 steps
  so.dt = 1e-3;
  so.seed = 11;
  const Trajectory traj = simulate(m, so);

  const GaussianState init = default_filter_init(m, so.t0, so.x0);
  FilterOptions fo;
  fo.init = init;
  const FilterSeries fs = run_filter(m, traj, fo);

  // No freezing, no cap: every anchor accumulates the full record so the
  // comparison covers all 10^4 steps end to end.
  const std::vector<GaussianState> online =
      complete_smoother(fs, 2 * fs.steps(), 1e-300);

  const oracle::KalmanRtsResult batch = oracle::kalman_rts(m, traj, init);

  double dev_f = 0.0, dev_s = 0.0;
  for (int j = 0; j <= fs.steps(); ++j) {
    dev_f = std::max(dev_f,
                     (fs.state[j].mean - batch.filtered[j].mean)
                         .cwiseAbs()
                         .maxCoeff());
    dev_f = std::max(
        dev_f,
        (fs.state[j].cov - batch.filtered[j].cov).cwiseAbs().maxCoeff());
    dev_s = std::max(
        dev_s,
        (online[j].mean - batch.smoothed[j].mean).cwiseAbs().maxCoeff());
    dev_s = std::max(
        dev_s,
        (online[j].cov - batch.smoothed[j].cov).cwiseAbs().maxCoeff());
  }
  r.passed = dev_f <= 1e-6 && dev_s <= 1e-6;
  r.detail = fmt::format("max filter dev {:.3g}, max smoother dev {:.3g} "
                         "over {} steps",
                         dev_f, dev_s, fs.steps());
}

// ---------------------------------------------------------------------------
// 4. Range-length bound directions on randomized profiles.

void c4_length_bounds(CriterionResult& r) {
  std::mt19937 gen(1357);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);

  double worst_fwd = -1.0, worst_bwd = -1.0, worst_eq = 0.0, worst_dual = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int len = 5 + static_cast<int>(ud(gen) * 56);
    const double dt_eff = 0.01 + 0.49 * ud(gen);
    std::vector<double> prof(len);
    for (double& v : prof) v = ud(gen) < 0.2 ? 0.0 : std::abs(nd(gen));
    if (*std::max_element(prof.begin(), prof.end()) == 0.0) prof[len / 2] = 1.0;

    // Natural extents of an n-sample profile: forward counts whole sample
    // cells (n dt), backward measures between sample points ((n-1) dt).
    const double span = len * dt_eff;
    const double horizon = (len - 1) * dt_eff;

    const double fa = forward_length_approx(prof, dt_eff);
    const double fe = oracle::forward_length_exact(prof, dt_eff, span);
    const double ba = backward_length_approx(prof, dt_eff);
    const double be = oracle::backward_length_exact(prof, dt_eff, horizon);
    worst_fwd = std::max(worst_fwd, fa - fe);           // must stay <= 1e-9
    worst_bwd = std::max(worst_bwd, be - ba);           // must stay <= 1e-9
    worst_dual = std::max(
        worst_dual,
        std::abs(fe - forward_length_exact(prof, dt_eff, span)));
    worst_dual = std::max(
        worst_dual,
        std::abs(be - backward_length_exact(prof, dt_eff, horizon)));

    // Monotone profiles: the norm ratio is tight.  Nonincreasing for the
    // forward direction; nondecreasing and zero-anchored for the backward
    // one, matching the vanishing of the backward metric at the window's
    // far end (a nonzero leading sample would leave a dt * v0 / peak slack
    // because the below-threshold sup never charges the first cell).
    std::vector<double> mono = prof;
    std::sort(mono.begin(), mono.end(), std::greater<>());
    worst_eq = std::max(worst_eq,
                        std::abs(forward_length_approx(mono, dt_eff) -
                                 oracle::forward_length_exact(mono, dt_eff,
                                                              span)));
    std::reverse(mono.begin(), mono.end());
    mono.front() = 0.0;
    worst_eq = std::max(worst_eq,
                        std::abs(backward_length_approx(mono, dt_eff) -
                                 oracle::backward_length_exact(mono, dt_eff,
                                                               horizon)));
  }
  r.passed = worst_fwd <= 1e-9 && worst_bwd <= 1e-9 && worst_eq <= 1e-6 &&
             worst_dual <= 1e-9;
  r.detail = fmt::format(
      "fwd slack {:.3g}, bwd slack {:.3g}, monotone gap {:.3g}, "
      "route gap {:.3g}",
      worst_fwd, worst_bwd, worst_eq, worst_dual);
}

// ---------------------------------------------------------------------------
// 5. Endpoint identities.

void c5_endpoints(CriterionResult& r) {
  double worst_head = 0.0, worst_tail = 0.0, worst_origin = 0.0;

  // (a)+(b) on a scalar-hidden and a two-hidden run; the stride deliberately
  // does not divide the run length so the closing samples are off-grid.
  auto check_run = [&](const CgnsModel& m, const Vec& x0, const Vec& y0,
                       std::uint64_t seed) {
    SimulateOptions so;
    so.x0 = x0;
    so.y0 = y0;
    so.t_end = 3.0;
    so.dt = 1e-3;
    so.seed = seed;
    const Trajectory traj = simulate(m, so);
    const FilterSeries fs = run_filter(m, traj, {});
    SmootherOptions sopt;
    sopt.analysis_stride = 7;
    sopt.keep_profiles = true;
    OnlineSmoother sm(fs, sopt);
    sm.run();

    std::vector<int> anchors;
    for (const BackwardPoint& bp : sm.backward()) {
      anchors.push_back(bp.n);
      if (!bp.beta.empty()) worst_origin = std::max(worst_origin, bp.beta[0]);
    }
    for (const ForwardRange& fr : forward_ranges(sm, anchors))
      worst_tail = std::max(worst_tail, std::abs(fr.profile.back()));
  };
  {
    ReducedLinearParams p;
    p.fy_amp = 1.0;
    p.fy_period = 2.0;
    check_run(reduced_linear_model(p), Vec::Zero(1), Vec::Zero(1), 21);
  }
  check_run(linear_two_hidden_model(), Vec::Zero(1), Vec::Zero(2), 22);

  // (c) zero-coupling model: assimilation never revises anything.
  {
    const CgnsModel m = decoupled_model();
    SimulateOptions so;
    so.x0 = Vec::Zero(1);
    so.y0 = Vec::Zero(1);
    so.t_end = 2.0;
    so.dt = 1e-3;
    so.seed = 23;
    const Trajectory traj = simulate(m, so);
    const CirSeries s = run_query(m, traj, CausalQuery{});
    for (const CirPoint& p : s.points) {
      worst_head = std::max(worst_head, std::abs(p.aci.total()));
      worst_head = std::max(worst_head, p.peak_f);
      worst_head = std::max(worst_head, p.peak_b);
    }
  }

  r.passed = worst_tail <= 1e-14 && worst_origin <= 1e-14 &&
             worst_head <= 1e-14;
  r.detail = fmt::format(
      "profile tail sup {:.3g}, origin sup {:.3g}, decoupled sup {:.3g}",
      worst_tail, worst_origin, worst_head);
}

// ---------------------------------------------------------------------------
// 6. Backward range magnitude: record-length invariance on the reduced pair,
//    and the scale-0.01 climate band.

std::vector<double> backward_taus(const CgnsModel& m, const Trajectory& traj,
                                  const std::vector<int>& cause, double t_lo,
                                  double t_hi) {
  const FilterSeries fs = run_filter(m, traj, {});
  SmootherOptions so;
  so.cause_indices = cause;
  OnlineSmoother sm(fs, so);
  sm.run();
  std::vector<double> taus;
  for (const BackwardPoint& bp : sm.backward()) {
    const double t = fs.time(bp.n);
    if (t >= t_lo - fs.dt / 2 && t <= t_hi + fs.dt / 2)
      taus.push_back(bp.tau_approx);
  }
  return taus;
}

double band_fraction(const std::vector<double>& taus, double lo, double hi) {
  if (taus.empty()) return 0.0;
  int in = 0;
  for (double t : taus) in += (t >= lo && t <= hi) ? 1 : 0;
  return static_cast<double>(in) / static_cast<double>(taus.size());
}

void c6_backward_theta1_and_climate(CriterionResult& r) {
  // Part 1: the backward range must not grow with the record length.
  ExperimentConfig rc = preset_config("reduced-linear");
  const CgnsModel reduced = make_model(rc.model);
  std::vector<double> medians;
  for (const double big_t : {20.0, 40.0, 60.0, 80.0, 100.0}) {
    rc.t_end = big_t;
    rc.window_end = big_t;
    const Trajectory traj = simulate_config(rc);
    medians.push_back(
        median(backward_taus(reduced, traj, {}, big_t / 2, big_t)));
  }
  const auto [mn, mx] = std::minmax_element(medians.begin(), medians.end());
  const double ratio = *mx / *mn;

  // Part 2: stated band for the climate run at scale separation 0.01.
  const ExperimentConfig cc = preset_config("climate-eps001");
  const CgnsModel climate = make_model(cc.model);
  const Trajectory traj = simulate_config(cc);
  const std::vector<double> taus =
      backward_taus(climate, traj, {0}, cc.window_start, cc.window_end);
  const double frac = band_fraction(taus, 0.008, 0.02);

  r.passed = ratio <= 3.0 && frac >= 0.80;
  r.detail = fmt::format(
      "record-length spread {:.2f} (medians {:.4g}..{:.4g}); climate band "
      "fraction {:.1f}% (median tau_b {:.4g})",
      ratio, *mn, *mx, 100 * frac, median(taus));
}

// ---------------------------------------------------------------------------
// 7. Climate band at scale separation 0.1.

void c7_climate_band(CriterionResult& r) {
  const ExperimentConfig cc = preset_config("climate-eps01");
  const CgnsModel climate = make_model(cc.model);
  const Trajectory traj = simulate_config(cc);
  const std::vector<double> taus =
      backward_taus(climate, traj, {0}, cc.window_start, cc.window_end);
  const double frac = band_fraction(taus, 0.02, 0.05);
  r.passed = frac >= 0.80;
  r.detail = fmt::format("band fraction {:.1f}% (median tau_b {:.4g})",
                         100 * frac, median(taus));
}

// ---------------------------------------------------------------------------
// 8. Large-noise conditioning converges to the exact limit.

void c8_conditioning_limit(CriterionResult& r) {
  const ExperimentConfig lc = preset_config("lorenz84-default");
  const CgnsModel m = make_model(lc.model);
  const Trajectory traj = simulate_config(lc);

  CausalQuery q;
  q.cause_indices = {0};
  q.effect_indices = {0};
  q.conditioning_observed = {1};

  q.mode = CausalQuery::Mode::kExactLimit;
  const CirSeries exact = run_query(m, traj, q);

  q.mode = CausalQuery::Mode::kLargeNoise;
  q.noise_scale = 1e8;
  const CirSeries approx = run_query(m, traj, q);

  double sup = std::numeric_limits<double>::infinity();
  if (exact.points.size() == approx.points.size()) {
    sup = 0.0;
    for (size_t i = 0; i < exact.points.size(); ++i)
      sup = std::max(sup, std::abs(exact.points[i].aci.total() -
                                   approx.points[i].aci.total()));
  }
  r.passed = sup <= 1e-4;
  r.detail = fmt::format("sup |exact-limit - large-noise| = {:.3g} over {} "
                         "points",
                         sup, exact.points.size());
}

// ---------------------------------------------------------------------------
// 9. Qualitative report (documented, non-gating).

std::vector<double> significant_maxima_times(const CirSeries& s) {
  std::vector<double> times;
  double peak = 0.0;
  for (const CirPoint& p : s.points) peak = std::max(peak, p.aci.total());
  for (size_t i = 1; i + 1 < s.points.size(); ++i) {
    const double v = s.points[i].aci.total();
    if (v > s.points[i - 1].aci.total() && v > s.points[i + 1].aci.total() &&
        v >= 0.5 * peak)
      times.push_back(s.points[i].t);
  }
  return times;
}

void c9_qualitative_report(CriterionResult& r, const std::string& work_dir) {
  const double w1_lo = 76.0, w1_hi = 82.0, w2_lo = 97.5, w2_hi = 100.0;
  int hit1 = 0, hit2 = 0;
  std::string per_seed;

  ExperimentConfig cc = preset_config("climate-eps001");
  const CgnsModel climate = make_model(cc.model);
  const int n_seeds = 10;
  for (int i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed = 201 + i;
    const Trajectory traj = simulate_config(cc, seed);
    CausalQuery q;
    q.cause_indices = {0};
    const CirSeries full = run_query(climate, traj, q);
    CirSeries s;
    for (const CirPoint& p : full.points)
      if (p.t >= cc.window_start && p.t <= cc.window_end) s.points.push_back(p);

    const std::vector<double> maxima = significant_maxima_times(s);
    bool in1 = false, in2 = false;
    for (double t : maxima) {
      in1 = in1 || (t >= w1_lo && t <= w1_hi);
      in2 = in2 || (t >= w2_lo && t <= w2_hi);
    }
    hit1 += in1 ? 1 : 0;
    hit2 += in2 ? 1 : 0;
    std::string times;
    for (double t : maxima) times += fmt::format(" {:.2f}", t);
    per_seed += fmt::format("- seed {}: window1 {} window2 {}; maxima:{}\n",
                            seed, in1 ? "hit" : "miss", in2 ? "hit" : "miss",
                            times.empty() ? " none" : times.c_str());
  }

  // Conditional influence on the multiscale triad: the second fast mode's
  // influence on its slow partner, conditioned on the other pair.
  const ExperimentConfig mc = preset_config("multiscale-default");
  const CgnsModel multi = make_model(mc.model);
  const Trajectory mtraj = simulate_config(mc);
  CausalQuery mq;
  mq.cause_indices = {1};
  mq.effect_indices = {1};
  mq.conditioning_observed = {0};
  mq.conditioning_hidden = {0};
  const CirSeries ms = run_query(multi, mtraj, mq);
  double min_aci = std::numeric_limits<double>::infinity();
  for (const CirPoint& p : ms.points)
    if (p.t >= mc.window_start && p.t <= mc.window_end)
      min_aci = std::min(min_aci, p.aci.total());

  fsys::create_directories(work_dir);
  const std::string path = work_dir + "/qualitative.md";
  std::ofstream rep(path, std::ios::binary);
  rep << "# Qualitative reproduction report\n\n"
      << "Climate run (scale separation 0.01), influence of the fast mode on "
         "the observed slow mode, ten seeds.\n"
      << fmt::format(
             "Prominent influence maxima inside [{}, {}]: {}/{} seeds; "
             "inside [{}, {}]: {}/{} seeds.\n\n",
             w1_lo, w1_hi, hit1, n_seeds, w2_lo, w2_hi, hit2, n_seeds)
      << per_seed
      << fmt::format(
             "\nMultiscale conditional influence (second fast mode on its "
             "slow partner given the first pair): minimum over the analysis "
             "window = {:.4g} nats (strictly positive: {}).\n",
             min_aci, min_aci > 0.0 ? "yes" : "no");

  r.passed = static_cast<bool>(rep);
  r.detail = fmt::format(
      "windows hit {}/{} and {}/{}; multiscale min influence {:.3g}; "
      "report at {}",
      hit1, n_seeds, hit2, n_seeds, min_aci, path);
}

// ---------------------------------------------------------------------------
// 10. Byte-identical artifacts across repeated preset runs.

bool dirs_identical(const fsys::path& a, const fsys::path& b,
                    std::string& why) {
  auto listing = [](const fsys::path& root) {
    std::vector<std::string> rel;
    for (const auto& e : fsys::recursive_directory_iterator(root))
      if (e.is_regular_file())
        rel.push_back(fsys::relative(e.path(), root).string());
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  const std::vector<std::string> fa = listing(a), fb = listing(b);
  if (fa != fb) {
    why = "file sets differ";
    return false;
  }
  for (const std::string& f : fa) {
    std::ifstream ia(a / f, std::ios::binary), ib(b / f, std::ios::binary);
    std::string ca((std::istreambuf_iterator<char>(ia)),
                   std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(ib)),
                   std::istreambuf_iterator<char>());
    if (ca != cb) {
      why = fmt::format("'{}' differs", f);
      return false;
    }
  }
  return true;
}

void c10_determinism(CriterionResult& r, const std::string& work_dir) {
  std::string detail;
  bool ok = true;
  for (const char* preset : {"reduced-linear", "multiscale-default"}) {
    ExperimentConfig cfg = preset_config(preset);
    const std::string da = fmt::format("{}/repro-{}-a", work_dir, preset);
    const std::string db = fmt::format("{}/repro-{}-b", work_dir, preset);
    fsys::remove_all(da);
    fsys::remove_all(db);
    cfg.out_dir = da;
    run_experiment(cfg);
    cfg.out_dir = db;
    run_experiment(cfg);
    std::string why;
    const bool same = dirs_identical(da, db, why);
    ok = ok && same;
    detail += fmt::format("{}{}: {}", detail.empty() ? "" : "; ", preset,
                          same ? "identical" : why);
  }
  r.passed = ok;
  r.detail = detail;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt) {
  auto wanted = [&](int id) {
    return opt.only.empty() ||
           std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
  };

  std::vector<CriterionResult> out;
  if (wanted(1))
    out.push_back(timed(1, "Gaussian divergence closed form vs quadrature",
                        true, c1_divergence_oracle));
  if (wanted(2))
    out.push_back(
        timed(2, "reduced-pair equilibrium variances", true, c2_equilibrium));
  if (wanted(3))
    out.push_back(timed(3, "online smoother vs batch Kalman/RTS", true,
                        c3_smoother_oracle));
  if (wanted(4))
    out.push_back(
        timed(4, "range-length bound directions", true, c4_length_bounds));
  if (wanted(5))
    out.push_back(timed(5, "endpoint identities", true, c5_endpoints));
  if (wanted(6))
    out.push_back(timed(6, "backward-range invariance and climate 0.01 band",
                        true, c6_backward_theta1_and_climate));
  if (wanted(7))
    out.push_back(
        timed(7, "climate 0.1 backward band", true, c7_climate_band));
  if (wanted(8))
    out.push_back(timed(8, "large-noise conditioning vs exact limit", true,
                        c8_conditioning_limit));
  if (wanted(9))
    out.push_back(timed(9, "qualitative reproduction report", false,
                        [&](CriterionResult& r) {
                          c9_qualitative_report(r, opt.work_dir);
                        }));
  if (wanted(10))
    out.push_back(timed(10, "byte-identical preset reruns", true,
                        [&](CriterionResult& r) {
                          c10_determinism(r, opt.work_dir);
                        }));
  return out;
}

void print_results(const std::vector<CriterionResult>& results,
                   std::FILE* out) {
  for (const CriterionResult& r : results)
    std::fprintf(out, "[%s] criterion %d: %s%s (%.1f s) -- %s\n",
                 r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                 r.gating ? "" : " [non-gating]", r.seconds,
                 r.detail.c_str());
}

bool all_gating_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results)
    if (r.gating && !r.passed) return false;
  return true;
}

}  // namespace aci
