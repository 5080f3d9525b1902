#include "aci/entropy.hpp"

#include <fmt/format.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace aci {

EntropyValue gauss_relative_entropy(const GaussianState& p, const GaussianState& q) {
  const Eigen::Index n = p.dim();
  if (n == 0 || q.dim() != n || p.cov.rows() != n || q.cov.rows() != n)
    throw Error(fmt::format("gauss_relative_entropy: dimension mismatch (p: {}, q: {})",
                            p.dim(), q.dim()));

  Eigen::LLT<Mat> llt(q.cov);
  if (llt.info() != Eigen::Success)
    throw Error("gauss_relative_entropy: reference covariance is not positive definite");
  const Mat& lq = llt.matrixL();

  EntropyValue out;
  const Vec white = lq.triangularView<Eigen::Lower>().solve(p.mean - q.mean);
  out.signal = 0.5 * white.squaredNorm();

  // Congruence M = Lq^{-1} Rp Lq^{-T}: symmetric, similar to Rp Rq^{-1}.
  Mat half = lq.triangularView<Eigen::Lower>().solve(p.cov);
  Mat m = lq.triangularView<Eigen::Lower>().solve(half.transpose().eval());
  symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success)
    throw Error("gauss_relative_entropy: eigendecomposition failed");

  double disp = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = es.eigenvalues()[i];
    if (lam <= 0.0)
      throw Error(fmt::format(
          "gauss_relative_entropy: degenerate argument covariance (eigenvalue {:.3e})", lam));
    disp += lam - 1.0 - std::log(lam);
  }
  out.dispersion = 0.5 * disp;
  return out;
}

EntropyValue aci_metric(const GaussianState& smoother, const GaussianState& filter) {
  return gauss_relative_entropy(smoother, filter);
}

}  // namespace aci
