#include "devrisk/ar.hpp"

#include <limits>

#include "ols.hpp"

namespace devrisk {

namespace {

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Rows t = first_row..n-1 regressing y_t on (1, y_{t-1}, ..., y_{t-p}).
void build_design(std::span<const double> y, int p, int first_row, Eigen::MatrixXd& X, Eigen::VectorXd& target) {
  const int n = static_cast<int>(y.size());
  const int rows = n - first_row;
  X.resize(rows, p + 1);
  target.resize(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = first_row + r;
    X(r, 0) = 1.0;
    for (int i = 1; i <= p; ++i) X(r, i) = y[static_cast<std::size_t>(t - i)];
    target(r) = y[static_cast<std::size_t>(t)];
  }
}

ArModel mean_model(std::span<const double> train) {
  ArModel m;
  m.lag_order = 0;
  m.intercept = series_mean(train);
  double sse = 0.0;
  for (double v : train) sse += (v - m.intercept) * (v - m.intercept);
  m.nobs = static_cast<int>(train.size());
  m.fit_aic = detail::aic_from_sse(sse, m.nobs, 1, mean_square(train));
  return m;
}

}  // namespace

int ar_lag_limit(std::size_t n, int configured_max) {
  if (n < 4) return 0;
  return std::max(0, std::min(configured_max, static_cast<int>((n - 2) / 2)));
}

ArModel fit_ar_order(std::span<const double> train, int lag_order) {
  if (lag_order < 0) throw Error(ErrorCode::InvalidArgument, "lag order must be >= 0");
  if (train.size() < static_cast<std::size_t>(lag_order) + 2) {
    throw Error(ErrorCode::TooShort, "AR(" + std::to_string(lag_order) + ") needs at least " +
                                         std::to_string(lag_order + 2) + " points");
  }
  if (lag_order == 0) return mean_model(train);

  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  build_design(train, lag_order, lag_order, X, y);
  const auto fit = detail::ols(X, y);
  if (!fit) throw Error(ErrorCode::SingularDesign, "collinear lags in AR(" + std::to_string(lag_order) + ")");

  ArModel m;
  m.lag_order = lag_order;
  m.intercept = fit->coef(0);
  m.coefficients.assign(fit->coef.data() + 1, fit->coef.data() + fit->coef.size());
  m.nobs = static_cast<int>(fit->nobs);
  m.fit_aic = detail::aic_from_sse(fit->sse, fit->nobs, lag_order + 1, mean_square(train));
  return m;
}

ArModel fit_ar(std::span<const double> train, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be >= 0");
  if (train.size() < static_cast<std::size_t>(max_lag) + 2) {
    throw Error(ErrorCode::TooShort, "fit_ar with max_lag " + std::to_string(max_lag) + " needs at least " +
                                         std::to_string(max_lag + 2) + " points");
  }
  if (max_lag == 0) return mean_model(train);

  // Common sample so that every candidate is scored on identical rows.
  const double scale = mean_square(train);
  int best_p = -1;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_lag; ++p) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    build_design(train, p, max_lag, X, y);
    const auto fit = detail::ols(X, y);
    if (!fit) continue;
    const double aic = detail::aic_from_sse(fit->sse, fit->nobs, p + 1, scale);
    if (aic < best_aic) {
      best_aic = aic;
      best_p = p;
    }
  }
  if (best_p <= 0) return mean_model(train);
  try {
    return fit_ar_order(train, best_p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularDesign) throw;
    return mean_model(train);
  }
}

ForecastResult ar_forecast(const ArModel& model, std::span<const double> train_tail, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
  const auto p = static_cast<std::size_t>(model.lag_order);
  if (train_tail.size() < p) {
    throw Error(ErrorCode::InvalidArgument, "AR forecast needs the last " + std::to_string(p) + " observations");
  }
  std::vector<double> history(train_tail.end() - static_cast<std::ptrdiff_t>(p), train_tail.end());
  ForecastResult out;
  out.model_tag = ModelTag::AR;
  out.values.reserve(static_cast<std::size_t>(horizon));
  for (int step = 0; step < horizon; ++step) {
    double next = model.intercept;
    for (std::size_t i = 1; i <= p; ++i) next += model.coefficients[i - 1] * history[history.size() - i];
    out.values.push_back(next);
    history.push_back(next);
  }
  return out;
}

}  // namespace devrisk
