#include "aci/types.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>

namespace aci {

bool enforce_psd(Mat& r, double rel_tol) {
  symmetrize(r);
  const Eigen::Index n = r.rows();
  const double scale = std::max(r.trace(), 0.0);
  const double floor = -rel_tol * std::max(scale, 1e-300);

  // Necessary conditions first; the eigensolver only runs on violation, which
  // keeps the per-step cost of the smoother-bank inner loop flat.
  bool suspicious = false;
  for (Eigen::Index i = 0; i < n && !suspicious; ++i)
    if (r(i, i) < floor) suspicious = true;
  if (!suspicious && n == 2) {
    const double det = r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0);
    if (det < floor * std::max(r(0, 0) + r(1, 1), 1e-300)) suspicious = true;
  } else if (!suspicious && n > 2) {
    Eigen::LDLT<Mat> ldlt(r);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) suspicious = true;
  }
  if (!suspicious) return false;

  Eigen::SelfAdjointEigenSolver<Mat> es(r);
  if (es.info() != Eigen::Success)
    throw Error("enforce_psd: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() >= floor) return false;
  Vec ev = es.eigenvalues().cwiseMax(0.0);
  r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  symmetrize(r);
  return true;
}

GaussianState marginal_state(const GaussianState& s, const std::vector<int>& indices) {
  const Eigen::Index n = s.dim();
  GaussianState out;
  out.mean.resize(static_cast<Eigen::Index>(indices.size()));
  out.cov.resize(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(indices.size()));
  for (size_t a = 0; a < indices.size(); ++a) {
    const int i = indices[a];
    if (i < 0 || i >= n)
      throw Error(fmt::format("marginal_state: index {} out of range [0,{})", i, n));
    out.mean[static_cast<Eigen::Index>(a)] = s.mean[i];
    for (size_t b = 0; b < indices.size(); ++b)
      out.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s.cov(i, indices[b]);
  }
  return out;
}

}  // namespace aci
