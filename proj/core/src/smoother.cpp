#include "aci/smoother.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "aci/cir.hpp"

namespace aci {

namespace {

GaussianState take_marginal(const GaussianState& g,
                            const std::vector<int>& idx) {
  if (idx.empty()) return g;
  return marginal_state(g, idx);
}

// Closed-form Gaussian relative entropy for the tiny marginals the bank
// evaluates millions of times: direct inversion and trace/log-det, with the
// (mathematically nonnegative) dispersion clamped against rounding.  The
// eigenvalue-based route in entropy.cpp stays the production metric; the two
// are cross-checked in the tests.
EntropyValue kl_scalar(double mp, double vp, double mq, double vq) {
  if (vp <= 0.0 || vq <= 0.0)
    throw Error("lagged assessment variance not positive");
  EntropyValue e;
  const double diff = mp - mq;
  e.signal = 0.5 * diff * diff / vq;
  const double r = vp / vq;
  e.dispersion = std::max(0.0, 0.5 * (r - 1.0 - std::log(r)));
  return e;
}

// 2x2 covariances packed as (xx, xy, yy).
EntropyValue kl_dim2(const double* mp, const double* vp, const double* mq,
                     const double* vq) {
  const double detp = vp[0] * vp[2] - vp[1] * vp[1];
  const double detq = vq[0] * vq[2] - vq[1] * vq[1];
  if (detp <= 0.0 || detq <= 0.0 || vp[0] <= 0.0 || vq[0] <= 0.0)
    throw Error("lagged assessment covariance not positive definite");
  const double d0 = mp[0] - mq[0];
  const double d1 = mp[1] - mq[1];
  EntropyValue e;
  e.signal = 0.5 *
             (vq[2] * d0 * d0 - 2.0 * vq[1] * d0 * d1 + vq[0] * d1 * d1) /
             detq;
  const double trace =
      (vq[2] * vp[0] - 2.0 * vq[1] * vp[1] + vq[0] * vp[2]) / detq;
  e.dispersion = std::max(0.0, 0.5 * (trace - 2.0 + std::log(detq / detp)));
  return e;
}

struct SmallMarg {
  double m[2];
  double v[3];
};

class BankBase {
 public:
  virtual ~BankBase() = default;
  virtual void push_anchor(int j, const GaussianState& s) = 0;
  // Apply one observed increment to all active entries; when pvals is given,
  // also record KL(updated || previous) on the cause marginal per entry,
  // ordered by anchor index.
  virtual void advance_entries(const FilterStep& st,
                               std::vector<std::pair<int, double>>* pvals) = 0;
  virtual void freeze_front(int n_now, const SmootherOptions& opt,
                            std::vector<GaussianState>& final_state,
                            std::vector<int>& freeze,
                            std::vector<std::uint8_t>& capped) = 0;
  virtual void freeze_all(int n_now, std::vector<GaussianState>& final_state,
                          std::vector<int>& freeze,
                          std::vector<std::uint8_t>& capped) = 0;
  virtual std::vector<BankEntryView> views() const = 0;
  virtual bool get(int j, GaussianState* s, Mat* d) const = 0;
};

template <int L>
class Bank : public BankBase {
 public:
  using VecL = Eigen::Matrix<double, L, 1>;
  using MatL = Eigen::Matrix<double, L, L>;

  Bank(int l, std::vector<int> cause) : l_(l), cause_(std::move(cause)) {}

  void push_anchor(int j, const GaussianState& s) override {
    Entry e;
    e.j = j;
    e.mean = s.mean;
    e.cov = s.cov;
    e.d.setIdentity(l_, l_);
    entries_.push_back(std::move(e));
  }

  void advance_entries(const FilterStep& st,
                       std::vector<std::pair<int, double>>* pvals) override {
    const VecL incr = st.update_incr;
    const MatL dec = st.update_cov_decr;
    const MatL gain = st.smoother_gain;
    const int dc = cause_.empty() ? l_ : static_cast<int>(cause_.size());
    for (size_t i = head_; i < entries_.size(); ++i) {
      Entry& e = entries_[i];
      SmallMarg before;
      GaussianState before_dyn;
      if (pvals) {
        if (dc <= 2)
          extract(e, &before);
        else
          before_dyn = take_marginal(to_state(e), cause_);
      }
      e.mean += e.d * incr;
      e.cov -= MatL(e.d * dec * e.d.transpose());
      e.cov = MatL(0.5 * (e.cov + e.cov.transpose()));
      if (pvals) {
        double p;
        if (dc == 1) {
          SmallMarg after;
          extract(e, &after);
          p = kl_scalar(after.m[0], after.v[0], before.m[0], before.v[0])
                  .total();
        } else if (dc == 2) {
          SmallMarg after;
          extract(e, &after);
          p = kl_dim2(after.m, after.v, before.m, before.v).total();
        } else {
          p = gauss_relative_entropy(take_marginal(to_state(e), cause_),
                                     before_dyn)
                  .total();
        }
        pvals->emplace_back(e.j, p);
      }
      e.d = MatL(e.d * gain);
    }
  }

  void freeze_front(int n_now, const SmootherOptions& opt,
                    std::vector<GaussianState>& final_state,
                    std::vector<int>& freeze,
                    std::vector<std::uint8_t>& capped) override {
    while (head_ < entries_.size()) {
      Entry& e = entries_[head_];
      const bool tol_ok = e.d.norm() < opt.lag_tol;
      const bool cap = (n_now - e.j) >= opt.lag_cap;
      if (!tol_ok && !cap) break;
      final_state[e.j] = to_state(e);
      freeze[e.j] = n_now;
      capped[e.j] = static_cast<std::uint8_t>(!tol_ok && cap);
      ++head_;
    }
    if (head_ > 4096 && 2 * head_ > entries_.size()) {
      entries_.erase(entries_.begin(),
                     entries_.begin() + static_cast<long>(head_));
      head_ = 0;
    }
  }

  void freeze_all(int n_now, std::vector<GaussianState>& final_state,
                  std::vector<int>& freeze,
                  std::vector<std::uint8_t>& capped) override {
    for (size_t i = head_; i < entries_.size(); ++i) {
      Entry& e = entries_[i];
      final_state[e.j] = to_state(e);
      freeze[e.j] = n_now;
      capped[e.j] = 0;
    }
    entries_.clear();
    head_ = 0;
  }

  std::vector<BankEntryView> views() const override {
    std::vector<BankEntryView> out;
    out.reserve(entries_.size() - head_);
    for (size_t i = head_; i < entries_.size(); ++i) {
      BankEntryView v;
      v.j = entries_[i].j;
      v.s = to_state(entries_[i]);
      v.d = entries_[i].d;
      out.push_back(std::move(v));
    }
    return out;
  }

  bool get(int j, GaussianState* s, Mat* d) const override {
    if (head_ >= entries_.size()) return false;
    const int j0 = entries_[head_].j;
    const size_t pos = head_ + static_cast<size_t>(j - j0);
    if (j < j0 || pos >= entries_.size()) return false;
    if (s) *s = to_state(entries_[pos]);
    if (d) *d = entries_[pos].d;
    return true;
  }

 private:
  struct Entry {
    int j;
    VecL mean;
    MatL cov;
    MatL d;
  };

  GaussianState to_state(const Entry& e) const {
    GaussianState g;
    g.mean = e.mean;
    g.cov = e.cov;
    return g;
  }

  void extract(const Entry& e, SmallMarg* m) const {
    if (cause_.empty()) {
      if (l_ == 1) {
        m->m[0] = e.mean[0];
        m->v[0] = e.cov(0, 0);
      } else {
        m->m[0] = e.mean[0];
        m->m[1] = e.mean[1];
        m->v[0] = e.cov(0, 0);
        m->v[1] = e.cov(0, 1);
        m->v[2] = e.cov(1, 1);
      }
    } else if (cause_.size() == 1) {
      const int c = cause_[0];
      m->m[0] = e.mean[c];
      m->v[0] = e.cov(c, c);
    } else {
      const int a = cause_[0], b = cause_[1];
      m->m[0] = e.mean[a];
      m->m[1] = e.mean[b];
      m->v[0] = e.cov(a, a);
      m->v[1] = e.cov(a, b);
      m->v[2] = e.cov(b, b);
    }
  }

  int l_;
  std::vector<int> cause_;
  std::vector<Entry> entries_;
  size_t head_ = 0;
};

std::unique_ptr<BankBase> make_bank(int l, const std::vector<int>& cause) {
  switch (l) {
    case 1:
      return std::make_unique<Bank<1>>(l, cause);
    case 2:
      return std::make_unique<Bank<2>>(l, cause);
    default:
      return std::make_unique<Bank<Eigen::Dynamic>>(l, cause);
  }
}

std::vector<int> resolve_cause(const std::vector<int>& cause, int l) {
  for (size_t i = 0; i < cause.size(); ++i) {
    if (cause[i] < 0 || cause[i] >= l)
      throw Error(fmt::format("cause index {} out of range [0, {})", cause[i],
                              l));
    if (i > 0 && cause[i] <= cause[i - 1])
      throw Error("cause indices must be strictly increasing");
  }
  if (static_cast<int>(cause.size()) == l) return {};  // identity marginal
  return cause;
}

}  // namespace

struct OnlineSmoother::Impl {
  const FilterSeries* fs;
  SmootherOptions opt;
  int n_steps;
  int l;
  int cur = 0;
  bool finished = false;
  std::vector<int> cause;
  std::unique_ptr<BankBase> bank;
  std::vector<GaussianState> final_state;
  std::vector<int> freeze;
  std::vector<std::uint8_t> capped;
  std::vector<BackwardPoint> backward;

  Impl(const FilterSeries& f, SmootherOptions o)
      : fs(&f), opt(std::move(o)), n_steps(f.steps()) {
    if (n_steps < 1) throw Error("filter series has no steps to smooth");
    if (opt.analysis_stride < 1)
      throw Error("analysis stride must be at least 1");
    if (opt.lag_cap < 1) throw Error("lag cap must be at least 1");
    l = static_cast<int>(fs->state[0].mean.size());
    cause = resolve_cause(opt.cause_indices, l);
    bank = make_bank(l, cause);
    final_state.resize(n_steps + 1);
    freeze.assign(n_steps + 1, -1);
    capped.assign(n_steps + 1, 0);
    BackwardPoint origin;
    origin.n = 0;
    if (opt.exact_lengths) origin.tau_exact = 0.0;
    if (opt.keep_profiles) origin.beta = {0.0};
    backward.push_back(std::move(origin));
  }

  void advance() {
    if (cur >= n_steps)
      throw Error("smoother has already consumed the full series");
    const int n = cur;
    const FilterStep& st = fs->step[n];
    bank->push_anchor(n, fs->state[n]);
    const int n_after = n + 1;
    const bool eval =
        (n_after % opt.analysis_stride == 0) || n_after == n_steps;
    std::vector<std::pair<int, double>> pvals;
    bank->advance_entries(st, eval ? &pvals : nullptr);
    bank->freeze_front(n_after, opt, final_state, freeze, capped);
    cur = n_after;
    if (eval) emit_backward(pvals, n_after, st);
  }

  void emit_backward(const std::vector<std::pair<int, double>>& pvals,
                     int n_now, const FilterStep& last_step) {
    // Newest-time entry: how much the last increment moved the newest
    // assessment relative to a pure forecast.
    GaussianState pred;
    pred.mean = last_step.pred_mean;
    pred.cov = last_step.pred_cov;
    enforce_psd(pred.cov, opt.psd_rel_tol);
    const double p_end =
        gauss_relative_entropy(take_marginal(fs->state[n_now], cause),
                               take_marginal(pred, cause))
            .total();

    // Centering: anchors frozen before this evaluation contribute exactly
    // zero revision, which forces the oldest entry's value to zero whenever
    // anything is frozen; otherwise anchor 0 is still live and centers the
    // profile itself.
    const double p0 =
        (!pvals.empty() && pvals.front().first == 0) ? pvals.front().second
                                                     : 0.0;
    BackwardPoint bp;
    bp.n = n_now;
    auto add = [&](double beta) {
      bp.sum += beta;
      bp.peak = std::max(bp.peak, beta);
    };
    for (const auto& [j, p] : pvals) add(std::abs(p - p0));
    add(std::abs(p_end - p0));
    bp.tau_approx = bp.peak > 0.0 ? fs->dt * bp.sum / bp.peak : 0.0;
    if (opt.exact_lengths || opt.keep_profiles) {
      std::vector<double> beta(n_now + 1, 0.0);
      for (const auto& [j, p] : pvals) beta[j] = std::abs(p - p0);
      beta[n_now] = std::abs(p_end - p0);
      if (opt.exact_lengths)
        bp.tau_exact = backward_length_exact(beta, fs->dt, n_now * fs->dt);
      if (opt.keep_profiles) bp.beta = std::move(beta);
    }
    backward.push_back(std::move(bp));
  }

  void finalize() {
    bank->freeze_all(n_steps, final_state, freeze, capped);
    final_state[n_steps] = fs->state[n_steps];
    freeze[n_steps] = n_steps;
    finished = true;
  }

  void require_finished() const {
    if (!finished)
      throw Error("smoother results requested before the pass completed");
  }
};

OnlineSmoother::OnlineSmoother(const FilterSeries& fs, SmootherOptions opt)
    : impl_(std::make_unique<Impl>(fs, std::move(opt))) {}
OnlineSmoother::~OnlineSmoother() = default;
OnlineSmoother::OnlineSmoother(OnlineSmoother&&) noexcept = default;
OnlineSmoother& OnlineSmoother::operator=(OnlineSmoother&&) noexcept = default;

void OnlineSmoother::advance() { impl_->advance(); }

void OnlineSmoother::run() {
  while (impl_->cur < impl_->n_steps) impl_->advance();
  impl_->finalize();
}

int OnlineSmoother::current() const { return impl_->cur; }
int OnlineSmoother::total_steps() const { return impl_->n_steps; }

std::vector<BankEntryView> OnlineSmoother::bank() const {
  return impl_->bank->views();
}

GaussianState OnlineSmoother::lagged(int j) const {
  if (j < 0 || j > impl_->cur)
    throw Error(fmt::format(
        "lagged state {} not available yet (pass is at {})", j, impl_->cur));
  if (j == impl_->cur && impl_->freeze[j] < 0) return impl_->fs->state[j];
  if (impl_->freeze[j] >= 0) return impl_->final_state[j];
  GaussianState s;
  if (!impl_->bank->get(j, &s, nullptr))
    throw Error(fmt::format("anchor {} missing from the bank", j));
  return s;
}

const std::vector<GaussianState>& OnlineSmoother::complete() const {
  impl_->require_finished();
  return impl_->final_state;
}

const std::vector<int>& OnlineSmoother::freeze_step() const {
  impl_->require_finished();
  return impl_->freeze;
}

const std::vector<std::uint8_t>& OnlineSmoother::capped() const {
  impl_->require_finished();
  return impl_->capped;
}

const std::vector<BackwardPoint>& OnlineSmoother::backward() const {
  impl_->require_finished();
  return impl_->backward;
}

const FilterSeries& OnlineSmoother::filter() const { return *impl_->fs; }
const SmootherOptions& OnlineSmoother::options() const { return impl_->opt; }

std::vector<GaussianState> complete_smoother(const FilterSeries& fs,
                                             int lag_cap, double lag_tol) {
  SmootherOptions opt;
  opt.lag_cap = lag_cap;
  opt.lag_tol = lag_tol;
  opt.analysis_stride = std::max(1, fs.steps());  // no intermediate profiles
  OnlineSmoother sm(fs, opt);
  sm.run();
  return sm.complete();
}

namespace {

// Replay one anchor against the finished pass, sampling the forward profile
// on the analysis stride.  Stops exactly where the main pass froze the
// anchor so the replayed state matches the stored final bitwise.
template <int L>
ForwardRange replay_anchor(const FilterSeries& fs, const GaussianState& final_j,
                           int j, int stop, bool was_capped,
                           const std::vector<int>& cause,
                           const SmootherOptions& opt) {
  using VecL = Eigen::Matrix<double, L, 1>;
  using MatL = Eigen::Matrix<double, L, L>;
  const int l = static_cast<int>(fs.state[0].mean.size());

  ForwardRange out;
  out.j = j;
  out.truncated = was_capped;

  const GaussianState final_marg = take_marginal(final_j, cause);
  const int dc = static_cast<int>(final_marg.mean.size());
  double fm[2] = {0, 0};
  double fv[3] = {0, 0, 0};
  if (dc <= 2) {
    fm[0] = final_marg.mean[0];
    fv[0] = final_marg.cov(0, 0);
    if (dc == 2) {
      fm[1] = final_marg.mean[1];
      fv[1] = final_marg.cov(0, 1);
      fv[2] = final_marg.cov(1, 1);
    }
  }

  VecL mean = fs.state[j].mean;
  MatL cov = fs.state[j].cov;
  MatL d;
  d.setIdentity(l, l);

  std::vector<double> profile;
  EntropyValue head;
  bool head_set = false;

  auto sample = [&](const VecL& mu, const MatL& r) {
    EntropyValue e;
    if (dc == 1) {
      int c = cause.empty() ? 0 : cause[0];
      e = kl_scalar(fm[0], fv[0], mu[c], r(c, c));
    } else if (dc == 2) {
      int a = cause.empty() ? 0 : cause[0];
      int b = cause.empty() ? 1 : cause[1];
      double qm[2] = {mu[a], mu[b]};
      double qv[3] = {r(a, a), r(a, b), r(b, b)};
      e = kl_dim2(fm, fv, qm, qv);
    } else {
      GaussianState g;
      g.mean = mu;
      g.cov = r;
      e = gauss_relative_entropy(final_marg, take_marginal(g, cause));
    }
    if (!head_set) {
      head = e;
      head_set = true;
    }
    profile.push_back(e.total());
  };

  sample(mean, cov);  // offset 0: the assimilative causal influence at t_j
  for (int n = j; n < stop; ++n) {
    const FilterStep& st = fs.step[n];
    const VecL incr = st.update_incr;
    const MatL dec = st.update_cov_decr;
    const MatL gain = st.smoother_gain;
    mean += d * incr;
    cov -= MatL(d * dec * d.transpose());
    cov = MatL(0.5 * (cov + cov.transpose()));
    if ((n + 1 - j) % opt.analysis_stride == 0) sample(mean, cov);
    d = MatL(d * gain);
  }
  // Always close the profile at the stop point.  The replayed state there is
  // bitwise the stored final, so this sample is an exact zero; it pins the
  // converged tail without affecting any length (zeros never extend an
  // exceedance set).
  if (stop > j && (stop - j) % opt.analysis_stride != 0) sample(mean, cov);

  out.aci = head;
  for (double v : profile) {
    out.sum += v;
    out.peak = std::max(out.peak, v);
  }
  const double dt_eff = fs.dt * opt.analysis_stride;
  out.tau_approx = out.peak > 0.0 ? dt_eff * out.sum / out.peak : 0.0;
  if (opt.exact_lengths)
    out.tau_exact = forward_length_exact(profile, dt_eff,
                                         (fs.steps() - j) * fs.dt);
  if (opt.keep_profiles) out.profile = std::move(profile);
  return out;
}

}  // namespace

std::vector<ForwardRange> forward_ranges(const OnlineSmoother& done,
                                         const std::vector<int>& anchors) {
  const FilterSeries& fs = done.filter();
  const SmootherOptions& opt = done.options();
  const std::vector<GaussianState>& final_state = done.complete();
  const std::vector<int>& freeze = done.freeze_step();
  const std::vector<std::uint8_t>& capped = done.capped();
  const std::vector<int> cause = resolve_cause(
      opt.cause_indices, static_cast<int>(fs.state[0].mean.size()));
  const int l = static_cast<int>(fs.state[0].mean.size());

  std::vector<ForwardRange> out;
  out.reserve(anchors.size());
  for (int j : anchors) {
    if (j < 0 || j > fs.steps())
      throw Error(fmt::format("anchor index {} outside the grid [0, {}]", j,
                              fs.steps()));
    switch (l) {
      case 1:
        out.push_back(replay_anchor<1>(fs, final_state[j], j, freeze[j],
                                       capped[j] != 0, cause, opt));
        break;
      case 2:
        out.push_back(replay_anchor<2>(fs, final_state[j], j, freeze[j],
                                       capped[j] != 0, cause, opt));
        break;
      default:
        out.push_back(replay_anchor<Eigen::Dynamic>(
            fs, final_state[j], j, freeze[j], capped[j] != 0, cause, opt));
        break;
    }
  }
  return out;
}

void write_bank_csv(const OnlineSmoother& sm, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error(fmt::format("cannot open '{}' for writing", path));
  const auto entries = sm.bank();
  const int n = sm.current();
  const int l = entries.empty()
                    ? 0
                    : static_cast<int>(entries.front().s.mean.size());
  std::fputs("j,n", f);
  for (int i = 0; i < l; ++i) std::fprintf(f, ",mu_%d", i);
  for (int i = 0; i < l; ++i)
    for (int c = i; c < l; ++c) std::fprintf(f, ",R_%d%d", i, c);
  std::fputs(",normD\n", f);
  for (const BankEntryView& e : entries) {
    std::fprintf(f, "%d,%d", e.j, n);
    for (int i = 0; i < l; ++i) std::fprintf(f, ",%.12g", e.s.mean[i]);
    for (int i = 0; i < l; ++i)
      for (int c = i; c < l; ++c) std::fprintf(f, ",%.12g", e.s.cov(i, c));
    std::fprintf(f, ",%.12g\n", e.d.norm());
  }
  std::fclose(f);
}

}  // namespace aci
