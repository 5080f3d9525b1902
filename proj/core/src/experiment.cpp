#include "aci/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "aci/presets.hpp"
#include "aci/query.hpp"
#include "aci/svg.hpp"

#ifndef ACI_GIT_DESCRIBE
#define ACI_GIT_DESCRIBE "unknown"
#endif

namespace aci {

namespace {

Vec resolve_initial(const std::vector<double>& given, int n, const char* what,
                    const std::string& model) {
  if (given.empty()) return Vec::Zero(n);
  if (static_cast<int>(given.size()) != n)
    throw Error(fmt::format("{} has {} entries but model '{}' needs {}", what,
                            given.size(), model, n));
  return Eigen::Map<const Vec>(given.data(), n);
}

CausalQuery to_causal_query(const QuerySpec& qs) {
  CausalQuery q;
  q.cause_indices = qs.cause;
  q.effect_indices = qs.effect;
  q.conditioning_observed = qs.cond_obs;
  q.conditioning_hidden = qs.cond_hidden;
  q.mode = qs.mode == "large-noise" ? CausalQuery::Mode::kLargeNoise
                                    : CausalQuery::Mode::kExactLimit;
  q.noise_scale = qs.noise_scale;
  q.label = qs.label;
  return q;
}

CirSeries window_filter(const CirSeries& s, double lo, double hi, double dt) {
  CirSeries out;
  out.label = s.label;
  out.has_exact = s.has_exact;
  const double slack = dt / 2.0;
  for (const CirPoint& p : s.points)
    if (p.t >= lo - slack && p.t <= hi + slack) out.points.push_back(p);
  return out;
}

// The influence-value row and the range row shared by the full query figure
// and the standalone CSV re-renderer.
std::vector<svg::Panel> cir_panels(const CirSeries& s) {
  std::vector<svg::Panel> panels(2);
  svg::Panel& mid = panels[0];
  mid.title = fmt::format("{}: assimilative causal influence", s.label);
  mid.x_label = "t";
  mid.y_label = "nats";
  mid.include_zero = true;
  mid.series.resize(3);
  mid.series[0].label = "total";
  mid.series[1].label = "signal";
  mid.series[2].label = "dispersion";
  for (const CirPoint& p : s.points) {
    mid.series[0].x.push_back(p.t);
    mid.series[0].y.push_back(p.aci.total());
    mid.series[1].x.push_back(p.t);
    mid.series[1].y.push_back(p.aci.signal);
    mid.series[2].x.push_back(p.t);
    mid.series[2].y.push_back(p.aci.dispersion);
  }

  // Reverse-axis convention for the backward direction: forward reach is
  // drawn upward, backward reach downward (negated), so the panel reads as
  // influence extending into the future above the axis and into the past
  // below it.
  svg::Panel& bot = panels[1];
  bot.title = fmt::format("{}: causal influence ranges", s.label);
  bot.x_label = "t";
  bot.y_label = "forward up / backward down";
  bot.include_zero = true;
  bot.series.resize(s.has_exact ? 4 : 2);
  bot.series[0].label = "forward";
  bot.series[1].label = "backward";
  if (s.has_exact) {
    bot.series[2].label = "forward exact";
    bot.series[3].label = "backward exact";
  }
  for (const CirPoint& p : s.points) {
    bot.series[0].x.push_back(p.t);
    bot.series[0].y.push_back(p.tau_f_approx);
    bot.series[1].x.push_back(p.t);
    bot.series[1].y.push_back(-p.tau_b_approx);
    if (s.has_exact) {
      bot.series[2].x.push_back(p.t);
      bot.series[2].y.push_back(p.tau_f_exact);
      bot.series[3].x.push_back(p.t);
      bot.series[3].y.push_back(-p.tau_b_exact);
    }
  }
  return panels;
}

void write_query_figure(const std::string& path, const Trajectory& tr,
                        const CirSeries& s, double lo, double hi) {
  // Row 1: the trajectory inside the analysis window, downsampled so the
  // figure stays small.  Hidden truth (when stored) is overlaid for context.
  svg::Panel top;
  top.title = fmt::format("{}: trajectory", tr.model_name);
  top.x_label = "t";
  top.y_label = "state";
  {
    int j0 = tr.index_of(lo);
    int j1 = tr.index_of(hi);
    if (j1 < j0) std::swap(j0, j1);
    const int count = j1 - j0 + 1;
    const int stride = std::max(1, count / 1600);
    const int dims = tr.obs_dim + tr.hidden_dim;
    top.series.resize(dims);
    for (int d = 0; d < dims; ++d)
      top.series[d].label = d < tr.obs_dim
                                ? fmt::format("x[{}]", d)
                                : fmt::format("y[{}]", d - tr.obs_dim);
    for (int j = j0; j <= j1; j += stride) {
      for (int d = 0; d < dims; ++d) {
        top.series[d].x.push_back(tr.time(j));
        top.series[d].y.push_back(tr.state(j, d));
      }
    }
  }

  std::vector<svg::Panel> panels = cir_panels(s);
  panels.insert(panels.begin(), std::move(top));
  svg::write(path, panels);
}

std::string join_ints(const std::vector<int>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

CgnsModel make_model(const ModelChoice& mc) {
  if (mc.kind == "climate") return climate_model(mc.climate);
  if (mc.kind == "climate-gamma-hidden")
    return climate_model_gamma_hidden(mc.climate);
  if (mc.kind == "multiscale") return multiscale_model(mc.multiscale);
  if (mc.kind == "lorenz84") return lorenz84_model(mc.lorenz84);
  if (mc.kind == "reduced-linear") return reduced_linear_model(mc.reduced);
  throw Error(fmt::format("unknown model kind '{}'", mc.kind));
}

std::vector<std::string> preset_names() {
  return {"climate-eps001", "climate-eps01", "multiscale-default",
          "lorenz84-default", "reduced-linear"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.dt = 1e-3;
  cfg.stride = 10;
  cfg.lag_cap = 5000;
  cfg.lag_tol = 1e-6;
  cfg.out_dir = "aci-out/" + name;

  auto query = [](std::string qname, std::vector<int> cause) {
    QuerySpec q;
    q.name = std::move(qname);
    q.label = q.name;
    q.cause = std::move(cause);
    return q;
  };

  if (name == "climate-eps001" || name == "climate-eps01") {
    cfg.model.kind = "climate";
    cfg.model.climate.eps = name == "climate-eps001" ? 0.01 : 0.1;
    cfg.seed = name == "climate-eps001" ? 101 : 102;
    cfg.t_start = -10.0;
    cfg.t_end = 110.0;
    cfg.window_start = 0.0;
    cfg.window_end = 100.0;
    cfg.x0 = {0.0};
    cfg.y0 = {0.0, cfg.model.climate.gamma_bar};
    cfg.queries = {query("y", {0}), query("gamma", {1})};
    return cfg;
  }
  if (name == "multiscale-default") {
    cfg.model.kind = "multiscale";
    cfg.seed = 103;
    cfg.t_start = -10.0;
    cfg.t_end = 110.0;
    cfg.window_start = 0.0;
    cfg.window_end = 100.0;
    // x2 relaxes toward its forcing mean fx2_base / c2; start there so the
    // burn-in is spent on the attractor rather than on a transient.
    cfg.x0 = {0.0, cfg.model.multiscale.fx2_base / cfg.model.multiscale.c2};
    cfg.y0 = {0.0, 0.0};
    cfg.queries = {query("y1", {0}), query("y2", {1})};
    return cfg;
  }
  if (name == "lorenz84-default") {
    cfg.model.kind = "lorenz84";
    cfg.seed = 104;
    cfg.t_start = -10.0;
    cfg.t_end = 160.0;
    cfg.window_start = 0.0;
    cfg.window_end = 150.0;
    cfg.x0 = {0.0, 0.0};
    cfg.y0 = {1.0};
    QuerySpec cond = query("x-given-z", {0});
    cond.effect = {0};
    cond.cond_obs = {1};
    cfg.queries = {query("x", {0}), cond};
    return cfg;
  }
  if (name == "reduced-linear") {
    cfg.model.kind = "reduced-linear";
    cfg.model.reduced.fy_amp = 2.0;
    cfg.model.reduced.fy_period = 5.0;
    cfg.seed = 105;
    cfg.t_start = -10.0;
    cfg.t_end = 60.0;
    cfg.window_start = 0.0;
    cfg.window_end = 50.0;
    cfg.x0 = {0.0};
    cfg.y0 = {0.0};
    cfg.queries = {query("y", {0})};
    return cfg;
  }
  throw Error(fmt::format(
      "unknown preset '{}'; available: climate-eps001 climate-eps01 "
      "multiscale-default lorenz84-default reduced-linear",
      name));
}

void write_cir_figure(const std::string& path, const CirSeries& series) {
  svg::write(path, cir_panels(series));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const CgnsModel model = make_model(cfg.model);

  SimulateOptions sopt;
  sopt.x0 = resolve_initial(cfg.x0, model.obs_dim, "x0", model.name);
  sopt.y0 = resolve_initial(cfg.y0, model.hidden_dim, "y0", model.name);
  sopt.t0 = cfg.t_start;
  sopt.t_end = cfg.t_end;
  sopt.dt = cfg.dt;
  sopt.seed = cfg.seed;
  const Trajectory traj = simulate(model, sopt);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);

  {
    std::ofstream echo(dir / "config.ini", std::ios::binary);
    if (!echo)
      throw Error(fmt::format("cannot write '{}'",
                              (dir / "config.ini").string()));
    echo << render_config(cfg);
  }

  if (cfg.write_trajectory)
    write_trajectory_csv(traj, (dir / "trajectory.csv").string());

  ExperimentResult result;
  result.out_dir = cfg.out_dir;
  result.trajectory = traj;

  std::string query_meta;
  for (const QuerySpec& qs : cfg.queries) {
    const CausalQuery cq = to_causal_query(qs);

    QueryRunOptions qopt;
    qopt.smoother.analysis_stride = cfg.stride;
    qopt.smoother.lag_cap = cfg.lag_cap;
    qopt.smoother.lag_tol = cfg.lag_tol;
    qopt.smoother.exact_lengths = cfg.exact;
    if (cfg.write_filter)
      qopt.filter_csv = (dir / fmt::format("filter-{}.csv", qs.name)).string();
    if (cfg.write_bank)
      qopt.bank_csv = (dir / fmt::format("bank-{}.csv", qs.name)).string();

    const CirSeries full = run_query(model, traj, cq, qopt);
    CirSeries windowed =
        window_filter(full, cfg.window_start, cfg.window_end, cfg.dt);

    write_cir_csv(windowed, (dir / fmt::format("cir-{}.csv", qs.name)).string());
    if (cfg.svg)
      write_query_figure((dir / fmt::format("figure-{}.svg", qs.name)).string(),
                         traj, windowed, cfg.window_start, cfg.window_end);

    query_meta += fmt::format(
        "query {}: mode={} cause={} effect={} cond_obs={} cond_hidden={} "
        "points={}\n",
        qs.name, qs.mode, join_ints(qs.cause), join_ints(qs.effect),
        join_ints(qs.cond_obs), join_ints(qs.cond_hidden),
        windowed.points.size());
    result.series.push_back(std::move(windowed));
  }

  {
    std::ofstream meta(dir / "metadata.txt", std::ios::binary);
    if (!meta)
      throw Error(fmt::format("cannot write '{}'",
                              (dir / "metadata.txt").string()));
    meta << fmt::format("tool = aci {}\n", ACI_GIT_DESCRIBE)
         << fmt::format("model = {} (kind {})\n", model.name, cfg.model.kind)
         << fmt::format("observed_dim = {}\nhidden_dim = {}\n", model.obs_dim,
                        model.hidden_dim)
         << fmt::format("grid = [{:.12g}, {:.12g}] dt {:.12g} ({} steps)\n",
                        cfg.t_start, cfg.t_end, cfg.dt, traj.steps())
         << fmt::format("window = [{:.12g}, {:.12g}]\n", cfg.window_start,
                        cfg.window_end)
         << fmt::format("seed = {}\n", cfg.seed)
         << fmt::format("stride = {}\nlag_cap = {}\nlag_tol = {:.12g}\n",
                        cfg.stride, cfg.lag_cap, cfg.lag_tol)
         << fmt::format("exact_ranges = {}\n", cfg.exact ? "true" : "false")
         << query_meta;
  }

  return result;
}

}  // namespace aci
