#include "aci/query.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace aci {

namespace {

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_range(const std::vector<int>& v, int n, const char* what) {
  for (int i : v)
    if (i < 0 || i >= n)
      throw Error(
          fmt::format("{} index {} out of range [0, {})", what, i, n));
}

std::vector<int> complement(const std::vector<int>& v, int n) {
  std::vector<char> in(n, 0);
  for (int i : v) in[i] = 1;
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
  for (int i : a)
    if (std::find(b.begin(), b.end(), i) != b.end()) return true;
  return false;
}

}  // namespace

ResolvedQuery resolve_query(const CgnsModel& m, const CausalQuery& q) {
  ResolvedQuery r;
  r.cond_obs = sorted_unique(q.conditioning_observed);
  r.cond_hidden = sorted_unique(q.conditioning_hidden);
  check_range(r.cond_obs, m.obs_dim, "conditioning (observed)");
  check_range(r.cond_hidden, m.hidden_dim, "conditioning (hidden)");

  r.effect = q.effect_indices.empty() ? complement(r.cond_obs, m.obs_dim)
                                      : sorted_unique(q.effect_indices);
  check_range(r.effect, m.obs_dim, "effect");
  if (intersects(r.effect, r.cond_obs))
    throw Error("effect and neutralized observed coordinates must be disjoint");
  if (static_cast<int>(r.effect.size() + r.cond_obs.size()) != m.obs_dim)
    throw Error(
        "effect and neutralized coordinates must partition the observed "
        "block");
  if (r.effect.empty())
    throw Error("query neutralizes every observed coordinate");

  r.cause = q.cause_indices.empty() ? complement(r.cond_hidden, m.hidden_dim)
                                    : sorted_unique(q.cause_indices);
  check_range(r.cause, m.hidden_dim, "cause");
  if (intersects(r.cause, r.cond_hidden))
    throw Error("cause and marginalized hidden coordinates must be disjoint");
  if (r.cause.empty()) throw Error("query has an empty cause block");
  return r;
}

CgnsModel apply_conditioning(const CgnsModel& m, const CausalQuery& q) {
  const ResolvedQuery r = resolve_query(m, q);
  if (q.mode == CausalQuery::Mode::kExactLimit || r.cond_obs.empty()) return m;

  if (q.noise_scale <= 1.0)
    throw Error(fmt::format(
        "large-noise scale must exceed 1 (got {:g})", q.noise_scale));

  CgnsModel out = m;
  out.name = fmt::format("{}|large-noise", m.name);
  const std::vector<int> rows = r.cond_obs;
  const double s = q.noise_scale;
  const CgnsModel::MatFn base1 = m.obs_noise_1;
  const CgnsModel::MatFn base2 = m.obs_noise_2;
  out.obs_noise_1 = [base1, rows, s](double t, const Vec& x) {
    Mat n = base1(t, x);
    for (int rr : rows) n.row(rr) *= s;
    return n;
  };
  out.obs_noise_2 = [base2, rows, s](double t, const Vec& x) {
    Mat n = base2(t, x);
    for (int rr : rows) n.row(rr) *= s;
    return n;
  };
  return out;
}

CirSeries run_query(const CgnsModel& m, const Trajectory& traj,
                    const CausalQuery& q, const QueryRunOptions& opt) {
  m.check();
  const ResolvedQuery r = resolve_query(m, q);
  const CgnsModel analysis = apply_conditioning(m, q);

  FilterOptions fopt = opt.filter;
  fopt.active_rows.clear();
  if (q.mode == CausalQuery::Mode::kExactLimit && !r.cond_obs.empty())
    fopt.active_rows = r.effect;

  const FilterSeries fs = run_filter(analysis, traj, fopt);
  if (!opt.filter_csv.empty()) write_filter_csv(fs, opt.filter_csv);

  SmootherOptions sopt = opt.smoother;
  sopt.cause_indices = r.cause;
  OnlineSmoother sm(fs, sopt);
  if (opt.bank_csv.empty()) {
    sm.run();
  } else {
    // Snapshot the lag bank after the last observation but before completion
    // wipes it: the export shows which anchors the final datum still reaches.
    while (sm.current() < sm.total_steps()) sm.advance();
    write_bank_csv(sm, opt.bank_csv);
    sm.run();
  }

  // Analysis grid: the smoother's evaluation points (stride multiples plus
  // the final step).
  std::vector<int> anchors;
  for (const BackwardPoint& bp : sm.backward()) anchors.push_back(bp.n);
  const std::vector<ForwardRange> fwd = forward_ranges(sm, anchors);

  CirSeries series;
  series.label = q.label.empty()
                     ? fmt::format("{}:{}", m.name,
                                   q.mode == CausalQuery::Mode::kExactLimit
                                       ? "exact-limit"
                                       : "large-noise")
                     : q.label;
  series.has_exact = sopt.exact_lengths;
  series.points.reserve(anchors.size());
  const auto& back = sm.backward();
  for (size_t i = 0; i < anchors.size(); ++i) {
    const ForwardRange& f = fwd[i];
    const BackwardPoint& b = back[i];
    CirPoint p;
    p.t = fs.time(anchors[i]);
    p.aci = f.aci;
    p.tau_f_approx = f.tau_approx;
    p.tau_b_approx = b.tau_approx;
    p.tau_f_exact = f.tau_exact;
    p.tau_b_exact = b.tau_exact;
    p.peak_f = f.peak;
    p.peak_b = b.peak;
    p.weak_forward = f.peak < kWeakEvidenceNats;
    p.weak_backward = b.peak < kWeakEvidenceNats;
    p.forward_truncated = f.truncated;
    series.points.push_back(p);
  }
  return series;
}

}  // namespace aci
