#pragma once

#include "aci/types.hpp"

namespace aci {

// Relative entropy split into the two classical contributions:
//   signal     = (1/2) (mu_p - mu_q)^T Rq^{-1} (mu_p - mu_q)
//   dispersion = (1/2) (tr(Rp Rq^{-1}) - dim - log det(Rp Rq^{-1}))
// total() is their sum and equals KL(p || q) for Gaussians p, q.
struct EntropyValue {
  double signal = 0.0;
  double dispersion = 0.0;
  double total() const { return signal + dispersion; }
};

// KL(p || q) for Gaussians via the closed form above.  Numerics: factor
// Rq = L L^T, whiten both arguments, and take eigenvalues of the congruence
// M = L^{-1} Rp L^{-T}; dispersion is then (1/2) sum(lam - 1 - log lam) with
// every summand nonnegative, so no determinant over/underflow and dispersion
// >= 0 holds by construction.  Throws Error if q's covariance is not positive
// definite or if p's covariance leaves the congruence with a nonpositive
// eigenvalue beyond round-off (degenerate p); there is no silent jitter.
EntropyValue gauss_relative_entropy(const GaussianState& p, const GaussianState& q);

// Assimilative causal inference metric at one time: the information the full
// data record adds about the hidden state relative to the filter, i.e.
// KL(smoother || filter) evaluated on (a marginal block of) the two states.
EntropyValue aci_metric(const GaussianState& smoother, const GaussianState& filter);

}  // namespace aci
