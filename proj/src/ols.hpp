#pragma once

#include <Eigen/Dense>

#include <optional>

namespace devrisk::detail {

struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd std_err;
  double sse = 0.0;
  Eigen::Index nobs = 0;
};

// Least squares via column-pivoted QR. Returns nullopt when the design is
// rank deficient (relative pivot threshold 1e-9).
inline std::optional<OlsFit> ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-9);
  if (qr.rank() < X.cols()) return std::nullopt;

  OlsFit fit;
  fit.coef = qr.solve(y);
  const Eigen::VectorXd resid = y - X * fit.coef;
  fit.sse = resid.squaredNorm();
  fit.nobs = X.rows();

  const Eigen::Index dof = X.rows() - X.cols();
  fit.std_err = Eigen::VectorXd::Constant(X.cols(), std::numeric_limits<double>::quiet_NaN());
  if (dof > 0) {
    const double sigma2 = fit.sse / static_cast<double>(dof);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    fit.std_err = (sigma2 * xtx_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
  }
  return fit;
}

// Gaussian information criterion n*ln(SSE/n) + 2k with the variance floored so
// that exact fits compare through the penalty term alone.
inline double aic_from_sse(double sse, Eigen::Index n, int k, double scale) {
  const double nd = static_cast<double>(n);
  const double floor = 1e-12 * (1.0 + scale);
  return nd * std::log(std::max(sse / nd, floor)) + 2.0 * k;
}

}  // namespace devrisk::detail
