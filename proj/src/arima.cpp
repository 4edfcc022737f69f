#include "devrisk/arima.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "devrisk/adf.hpp"
#include "ols.hpp"

namespace devrisk {

namespace {

constexpr int kAdfMinLength = 10;

struct ParamLayout {
  bool intercept = false;
  int p = 0;
  int q = 0;

  int size() const { return (intercept ? 1 : 0) + p + q; }
  int ar_offset() const { return intercept ? 1 : 0; }
  int ma_offset() const { return ar_offset() + p; }
};

// Innovations e_t for t >= cond (earlier entries stay 0) and, if requested,
// their Jacobian with respect to the packed parameter vector.
double css_residuals(std::span<const double> w, const ParamLayout& layout, const Eigen::VectorXd& beta, int cond,
                     std::vector<double>& e, Eigen::MatrixXd* jac) {
  const int n = static_cast<int>(w.size());
  const int k = layout.size();
  e.assign(static_cast<std::size_t>(n), 0.0);
  if (jac) jac->setZero(n - cond, k);
  const double c = layout.intercept ? beta(0) : 0.0;
  double css = 0.0;
  for (int t = cond; t < n; ++t) {
    double et = w[t] - c;
    for (int i = 1; i <= layout.p; ++i) et -= beta(layout.ar_offset() + i - 1) * w[t - i];
    for (int j = 1; j <= layout.q; ++j) {
      if (t - j >= cond) et -= beta(layout.ma_offset() + j - 1) * e[static_cast<std::size_t>(t - j)];
    }
    e[static_cast<std::size_t>(t)] = et;
    css += et * et;

    if (jac) {
      const int r = t - cond;
      if (layout.intercept) (*jac)(r, 0) = -1.0;
      for (int i = 1; i <= layout.p; ++i) (*jac)(r, layout.ar_offset() + i - 1) = -w[t - i];
      for (int j = 1; j <= layout.q; ++j) {
        (*jac)(r, layout.ma_offset() + j - 1) = t - j >= cond ? -e[static_cast<std::size_t>(t - j)] : 0.0;
      }
      for (int j = 1; j <= layout.q; ++j) {
        if (t - j < cond) continue;
        const double theta = beta(layout.ma_offset() + j - 1);
        (*jac).row(r) -= theta * (*jac).row(r - j);
      }
    }
  }
  return css;
}

double mean_square(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

Eigen::VectorXd starting_values(std::span<const double> w, const ParamLayout& layout, int cond) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(layout.size());
  const int n = static_cast<int>(w.size());
  const int rows = n - cond;
  const int cols = (layout.intercept ? 1 : 0) + layout.p;
  if (cols == 0) return beta;
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = cond + r;
    int col = 0;
    if (layout.intercept) X(r, col++) = 1.0;
    for (int i = 1; i <= layout.p; ++i) X(r, col++) = w[t - i];
    y(r) = w[t];
  }
  if (auto fit = detail::ols(X, y)) {
    beta.head(cols) = fit->coef;
  } else if (layout.intercept) {
    beta(0) = y.mean();
  }
  return beta;
}

struct LmOutcome {
  Eigen::VectorXd beta;
  double css = 0.0;
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(std::span<const double> w, const ParamLayout& layout, int cond, Eigen::VectorXd beta,
                              int max_iterations) {
  std::vector<double> e;
  Eigen::MatrixXd jac;
  LmOutcome out;
  double css = css_residuals(w, layout, beta, cond, e, &jac);
  if (layout.size() == 0) {
    out.beta = beta;
    out.css = css;
    out.converged = true;
    return out;
  }
  double lambda = 1e-3;
  std::vector<double> trial_e;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    out.iterations = iter;
    Eigen::VectorXd resid(jac.rows());
    for (Eigen::Index r = 0; r < jac.rows(); ++r) resid(r) = e[static_cast<std::size_t>(cond + r)];
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * resid;
    if (grad.lpNorm<Eigen::Infinity>() <= 1e-12 * (1.0 + css)) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * (jtj.diagonal().array() + 1e-12).matrix();
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd candidate = beta + step;
      const double trial = css_residuals(w, layout, candidate, cond, trial_e, nullptr);
      if (std::isfinite(trial) && trial <= css) {
        const double rel_drop = (css - trial) / std::max(css, 1e-300);
        const double rel_step = step.norm() / (1.0 + beta.norm());
        beta = candidate;
        css = css_residuals(w, layout, beta, cond, e, &jac);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel_drop < 1e-12 || rel_step < 1e-10) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step at any damping: a stationary point of the objective.
    if (!accepted) out.converged = true;
    if (out.converged) break;
  }
  out.beta = beta;
  out.css = css;
  return out;
}

ArimaModel fit_differenced(std::span<const double> w, ArimaOrder order, int cond, int max_iterations) {
  if (order.p < 0 || order.q < 0 || order.d < 0) throw Error(ErrorCode::InvalidArgument, "negative ARIMA order");
  if (cond < order.p) throw Error(ErrorCode::InvalidArgument, "condition_on must be >= p");
  ParamLayout layout{order.d == 0, order.p, order.q};
  const int n = static_cast<int>(w.size());
  if (n < order.p + order.q + 2 || n - cond < layout.size() + 1) {
    throw Error(ErrorCode::TooShort, "ARIMA(" + std::to_string(order.p) + "," + std::to_string(order.d) + "," +
                                         std::to_string(order.q) + ") needs more differenced observations than " +
                                         std::to_string(n));
  }

  LmOutcome lm = levenberg_marquardt(w, layout, cond, starting_values(w, layout, cond), max_iterations);
  if (!lm.converged || !std::isfinite(lm.css)) {
    throw Error(ErrorCode::NonConvergence, "CSS optimizer did not converge within " +
                                               std::to_string(max_iterations) + " iterations");
  }

  ArimaModel model;
  model.order = order;
  model.has_intercept = layout.intercept;
  model.intercept = layout.intercept ? lm.beta(0) : 0.0;
  model.ar.assign(lm.beta.data() + layout.ar_offset(), lm.beta.data() + layout.ar_offset() + order.p);
  model.ma.assign(lm.beta.data() + layout.ma_offset(), lm.beta.data() + layout.ma_offset() + order.q);
  model.css = lm.css;
  model.nobs = n - cond;
  model.condition_on = cond;
  model.iterations = lm.iterations;
  model.fit_aic = detail::aic_from_sse(lm.css, model.nobs, order.p + order.q + 1, mean_square(w));
  return model;
}

// Bound on p and q so that every candidate keeps enough rows to estimate.
int order_limit(std::size_t n_differenced) {
  return std::max(0, (static_cast<int>(n_differenced) - 3) / 4);
}

struct SearchState {
  std::span<const double> w;
  int d = 0;
  int cond = 0;
  int max_p = 0;
  int max_q = 0;
  int max_iterations = 200;
  std::set<std::pair<int, int>> visited;
  ArimaOrder best{0, 0, 0};
  double best_aic = std::numeric_limits<double>::infinity();
  bool found = false;

  bool feasible(int p, int q) const {
    const int k = (d == 0 ? 1 : 0) + p + q;
    return p >= 0 && q >= 0 && p <= max_p && q <= max_q && static_cast<int>(w.size()) - cond >= k + 2;
  }

  // Returns true when (p, q) improved on the incumbent.
  bool consider(int p, int q) {
    if (!feasible(p, q) || !visited.insert({p, q}).second) return false;
    double aic = 0.0;
    try {
      aic = fit_differenced(w, ArimaOrder{p, d, q}, cond, max_iterations).fit_aic;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonConvergence || e.code() == ErrorCode::TooShort) return false;
      throw;
    }
    if (aic < best_aic) {
      best_aic = aic;
      best = ArimaOrder{p, d, q};
      found = true;
      return true;
    }
    return false;
  }
};

ArimaOrder search_pq(std::span<const double> w, int d, int max_p, int max_q, bool stepwise, int max_iterations) {
  SearchState s;
  s.w = w;
  s.d = d;
  s.max_p = std::min(max_p, order_limit(w.size()));
  s.max_q = std::min(max_q, order_limit(w.size()));
  s.cond = s.max_p;
  s.max_iterations = max_iterations;

  if (!stepwise) {
    for (int p = 0; p <= s.max_p; ++p) {
      for (int q = 0; q <= s.max_q; ++q) s.consider(p, q);
    }
  } else {
    for (auto [p, q] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) s.consider(p, q);
    bool improved = s.found;
    while (improved) {
      improved = false;
      const ArimaOrder center = s.best;
      for (int dp = -1; dp <= 1; ++dp) {
        for (int dq = -1; dq <= 1; ++dq) {
          if (dp == 0 && dq == 0) continue;
          if (s.consider(center.p + dp, center.q + dq)) improved = true;
        }
      }
    }
  }
  return s.found ? s.best : ArimaOrder{0, d, 0};
}

}  // namespace

std::vector<double> difference(std::span<const double> series, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "differencing order must be >= 0");
  std::vector<double> x(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    if (x.size() <= 1) {
      x.clear();
      break;
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) x[i] = x[i + 1] - x[i];
    x.pop_back();
  }
  return x;
}

std::vector<double> arima_residuals(const ArimaModel& model, std::span<const double> differenced) {
  ParamLayout layout{model.has_intercept, model.order.p, model.order.q};
  Eigen::VectorXd beta(layout.size());
  if (layout.intercept) beta(0) = model.intercept;
  for (int i = 0; i < layout.p; ++i) beta(layout.ar_offset() + i) = model.ar[static_cast<std::size_t>(i)];
  for (int j = 0; j < layout.q; ++j) beta(layout.ma_offset() + j) = model.ma[static_cast<std::size_t>(j)];
  std::vector<double> e;
  const int cond = std::min<int>(model.condition_on, static_cast<int>(differenced.size()));
  css_residuals(differenced, layout, beta, cond, e, nullptr);
  return e;
}

ArimaModel fit_arima(std::span<const double> train, ArimaOrder order, int condition_on, int max_iterations) {
  const auto w = difference(train, order.d);
  const int cond = condition_on < 0 ? order.p : condition_on;
  return fit_differenced(w, order, cond, max_iterations);
}

int select_differencing(std::span<const double> train, int d_max) {
  if (d_max < 0) throw Error(ErrorCode::InvalidArgument, "d_max must be >= 0");
  for (int d = 0; d < d_max; ++d) {
    const auto x = difference(train, d);
    if (x.size() < static_cast<std::size_t>(kAdfMinLength)) return d;
    if (adf_test(x).reject_unit_root) return d;
  }
  return d_max;
}

ArimaOrder select_arima_order(std::span<const double> train, const ArimaSearchConfig& config) {
  if (train.size() < static_cast<std::size_t>(kAdfMinLength)) {
    throw Error(ErrorCode::TooShort, "ARIMA order selection needs at least 10 points, got " +
                                         std::to_string(train.size()));
  }
  if (config.max_p < 0 || config.max_q < 0) throw Error(ErrorCode::InvalidArgument, "negative ARIMA grid bound");
  const int d = select_differencing(train, config.d_max);
  const auto w = difference(train, d);
  return search_pq(w, d, config.max_p, config.max_q, config.stepwise, config.max_iterations);
}

ArimaModel auto_arima(std::span<const double> train, const ArimaSearchConfig& config) {
  if (train.empty()) throw Error(ErrorCode::EmptyInput, "ARIMA fit on an empty series");
  ArimaOrder order{0, 0, 0};
  if (train.size() >= static_cast<std::size_t>(kAdfMinLength)) {
    order = select_arima_order(train, config);
  } else if (train.size() >= 3) {
    order = search_pq(train, 0, config.max_p, config.max_q, false, config.max_iterations);
  }
  try {
    return fit_arima(train, order, -1, config.max_iterations);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonConvergence && e.code() != ErrorCode::TooShort) throw;
  }
  // Persistence or mean model as the last resort.
  const ArimaOrder fallback{0, difference(train, order.d).empty() ? 0 : order.d, 0};
  return fit_arima(train, fallback, -1, config.max_iterations);
}

ForecastResult arima_forecast(const ArimaModel& model, std::span<const double> train, int horizon) {
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
  const int d = model.order.d;
  if (train.size() <= static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::InvalidArgument, "training series shorter than the differencing order");
  }
  std::vector<std::vector<double>> levels;
  levels.reserve(static_cast<std::size_t>(d) + 1);
  levels.emplace_back(train.begin(), train.end());
  for (int k = 1; k <= d; ++k) levels.push_back(difference(levels.back(), 1));

  std::vector<double> w = levels.back();
  std::vector<double> e = arima_residuals(model, w);
  const std::size_t n = w.size();
  const auto p = static_cast<std::size_t>(model.order.p);
  const auto q = static_cast<std::size_t>(model.order.q);
  if (n < p) throw Error(ErrorCode::InvalidArgument, "too few differenced observations for the AR terms");

  std::vector<double> future(static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) {
    double next = model.has_intercept ? model.intercept : 0.0;
    for (std::size_t i = 1; i <= p; ++i) next += model.ar[i - 1] * w[w.size() - i];
    for (std::size_t j = 1; j <= q; ++j) {
      if (e.size() >= j) next += model.ma[j - 1] * e[e.size() - j];
    }
    w.push_back(next);
    e.push_back(0.0);
    future[static_cast<std::size_t>(h)] = next;
  }

  // Integrate back through each differencing level.
  for (int k = d - 1; k >= 0; --k) {
    double prev = levels[static_cast<std::size_t>(k)].back();
    for (double& v : future) {
      v += prev;
      prev = v;
    }
  }

  ForecastResult out;
  out.model_tag = ModelTag::ARIMA;
  out.values = std::move(future);
  return out;
}

}  // namespace devrisk
