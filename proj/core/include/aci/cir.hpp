#pragma once

#include <limits>
#include <string>
#include <vector>

#include "aci/entropy.hpp"
#include "aci/types.hpp"

namespace aci {

// Influence-range lengths computed from discrete divergence profiles.
//
// A forward profile anchors at one time and lists the divergence between the
// fully informed and partially informed assessments of that time's hidden
// state, sampled at lead offsets 0, dt_eff, 2*dt_eff, ...  It starts at the
// assimilative causal influence value and decays to zero once later
// observations stop revising the anchor.
//
// A backward profile fixes the newest time T and lists, for each past grid
// time, how much the final observation revised that time's assessment,
// centered so the oldest entry is zero.
//
// Three length notions per direction:
//   approx       dt_eff * sum(profile) / max(profile); the norm-ratio form.
//                For forward profiles it lower-bounds the exact objective
//                length, for backward it upper-bounds it, with equality
//                exactly on monotone profiles.
//   subjective   threshold cut at a fixed eps.  Forward keeps the strict
//                exceedance set {value > eps}; backward keeps {value <= eps};
//                ties resolve by index order.
//   exact        objective length: the average of the subjective length over
//                eps in [0, peak].  The subjective length is piecewise
//                constant in eps, so averaging over the sorted distinct
//                profile values is exact (no quadrature knob).

double profile_peak(const std::vector<double>& profile);

double forward_length_approx(const std::vector<double>& profile,
                             double dt_eff);
// span caps the length at the available horizon T - t_anchor (relevant for
// strided profiles whose last sample may sit short of the final time).
double forward_length_subjective(const std::vector<double>& profile,
                                 double dt_eff, double span, double eps);
double forward_length_exact(const std::vector<double>& profile, double dt_eff,
                            double span);

double backward_length_approx(const std::vector<double>& profile,
                              double dt_eff);
// horizon is the elapsed data span T - t_0; a negative eps yields 0.
double backward_length_subjective(const std::vector<double>& profile,
                                  double dt_eff, double horizon, double eps);
double backward_length_exact(const std::vector<double>& profile, double dt_eff,
                             double horizon);

// Assembled per-time results of a causal query.
struct CirPoint {
  double t = 0.0;
  EntropyValue aci;              // divergence of smoother from filter at t
  double tau_f_approx = 0.0;
  double tau_b_approx = 0.0;
  // NaN unless exact lengths were requested.
  double tau_f_exact = std::numeric_limits<double>::quiet_NaN();
  double tau_b_exact = std::numeric_limits<double>::quiet_NaN();
  double peak_f = 0.0;           // profile maxima backing the weak-evidence flags
  double peak_b = 0.0;
  bool weak_forward = false;     // peak below the evidence threshold
  bool weak_backward = false;
  bool forward_truncated = false;  // anchor's profile hit the lag cap unfrozen
};

struct CirSeries {
  std::string label;
  bool has_exact = false;
  std::vector<CirPoint> points;
};

// Peaks under this many nats mark a length as unreliable in the output.
inline constexpr double kWeakEvidenceNats = 1e-4;

// CSV `t,aci,aci_signal,aci_dispersion,tau_f_approx,tau_b_approx
// [,tau_f_exact,tau_b_exact],Mf,Mb,flags`; flags cell holds
// semicolon-joined tokens (weak_f, weak_b, truncated_f) or is empty.
void write_cir_csv(const CirSeries& series, const std::string& path);

// Inverse of write_cir_csv (the label is not stored in the file and comes
// back empty).  Throws Error naming the file and line for missing columns or
// malformed numbers.
CirSeries read_cir_csv(const std::string& path);

}  // namespace aci
