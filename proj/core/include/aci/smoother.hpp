#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "aci/entropy.hpp"
#include "aci/filter.hpp"

namespace aci {

struct SmootherOptions {
  // An anchor's influence is exhausted once the Frobenius norm of its
  // accumulated gain product drops below lag_tol; lag_cap bounds the wait for
  // slowly mixing blocks (those anchors are flagged as truncated).
  double lag_tol = 1e-6;
  int lag_cap = 5000;
  // Backward ranges are evaluated, and forward profiles sampled, every this
  // many grid steps.  The final step is always evaluated as well.
  int analysis_stride = 10;
  // Also compute threshold-averaged (exact objective) lengths, not just the
  // norm-ratio approximations.
  bool exact_lengths = false;
  // Retain raw profiles on the result structs (tests and small runs only;
  // memory grows with run length).
  bool keep_profiles = false;
  // Hidden coordinates whose marginal the divergences are taken on
  // (empty = the full hidden block).
  std::vector<int> cause_indices;
  double psd_rel_tol = 1e-10;
};

// Backward influence range evaluated with data through grid index n: how far
// back the newest observation still revises past assessments.
struct BackwardPoint {
  int n = 0;
  double sum = 0.0;   // l1 mass of the centered revision profile
  double peak = 0.0;  // sup of the same
  double tau_approx = 0.0;
  double tau_exact = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> beta;  // kept only with keep_profiles
};

// Forward influence range anchored at grid index j: how long future
// observations keep revising the assessment of time t_j.
struct ForwardRange {
  int j = 0;
  EntropyValue aci;   // profile head: complete-smoother vs filter divergence
  double sum = 0.0;
  double peak = 0.0;
  double tau_approx = 0.0;
  double tau_exact = std::numeric_limits<double>::quiet_NaN();
  bool truncated = false;  // anchor hit the lag cap before its gains vanished
  std::vector<double> profile;  // kept only with keep_profiles
};

struct BankEntryView {
  int j = 0;
  GaussianState s;  // current lagged assessment of y at grid index j
  Mat d;            // accumulated one-step gain product feeding future updates
};

// Fixed-point online smoother over a completed filter pass.  Each observed
// increment updates every unfrozen past assessment through one cached gain
// product per anchor, so the cost per step is proportional to the active lag
// and the pass never revisits old observations.  Results after run() match a
// batch backward sweep to rounding error.
class OnlineSmoother {
 public:
  explicit OnlineSmoother(const FilterSeries& fs, SmootherOptions opt = {});
  ~OnlineSmoother();
  OnlineSmoother(OnlineSmoother&&) noexcept;
  OnlineSmoother& operator=(OnlineSmoother&&) noexcept;

  // Incorporate the next observed increment into all active assessments.
  void advance();
  // Advance to the end of the filter series and finalize.
  void run();

  int current() const;      // grid index n: states condition on x(t <= t_n)
  int total_steps() const;
  std::vector<BankEntryView> bank() const;
  // Lagged assessment s^{j, current}: the live bank entry for active anchors,
  // the frozen final for exhausted ones, the filter state for j == current.
  GaussianState lagged(int j) const;

  // Valid after run():
  const std::vector<GaussianState>& complete() const;  // s^{j, N} for all j
  const std::vector<int>& freeze_step() const;  // first n with s^{j,n} final
  const std::vector<std::uint8_t>& capped() const;
  const std::vector<BackwardPoint>& backward() const;

  const FilterSeries& filter() const;
  const SmootherOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Batch convenience: run the full pass and return the complete-smoother
// states only.
std::vector<GaussianState> complete_smoother(const FilterSeries& fs,
                                             int lag_cap = 5000,
                                             double lag_tol = 1e-6);

// Forward influence ranges for the given anchor indices, replayed against the
// finished pass.  Each anchor is independent; profiles are sampled on the
// analysis stride and stop where the main pass froze that anchor, so the two
// passes agree bitwise.
std::vector<ForwardRange> forward_ranges(const OnlineSmoother& done,
                                         const std::vector<int>& anchors);

// Final bank snapshot: CSV `j,n,mu_...,R_...,normD` (upper-triangle
// covariance), one row per active anchor.
void write_bank_csv(const OnlineSmoother& sm, const std::string& path);

}  // namespace aci
