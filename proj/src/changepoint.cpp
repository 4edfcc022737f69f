#include "devrisk/changepoint.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>

namespace devrisk {

namespace {

constexpr double kDaysPerYear = 365.25;
constexpr double kNoiseVarianceFloor = 1e-4;
constexpr int kMaxNoiseRounds = 100;

Eigen::MatrixXd fourier_features(std::span<const Date> dates, int order) {
  Eigen::MatrixXd s(static_cast<Eigen::Index>(dates.size()), 2 * order);
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(dates[i].day_number()) / kDaysPerYear;
    for (int o = 1; o <= order; ++o) {
      s(static_cast<Eigen::Index>(i), 2 * (o - 1)) = std::sin(o * x);
      s(static_cast<Eigen::Index>(i), 2 * (o - 1) + 1) = std::cos(o * x);
    }
  }
  return s;
}

double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

struct TrendSolve {
  double k = 0.0;
  double m = 0.0;
  Eigen::VectorXd delta;
};

// min 0.5 ||y - g.*(k t + m + H delta)||^2 + lambda ||delta||_1.
// k and m are unpenalized, so they are profiled out by projecting onto the
// orthogonal complement of [g, g.*t]; coordinate descent then runs on the
// projected hinge columns.
TrendSolve solve_weighted_lasso(const Eigen::VectorXd& t, const Eigen::VectorXd& y, const Eigen::VectorXd& g,
                                const Eigen::MatrixXd& hinge, double lambda, const TrendConfig& config,
                                const Eigen::VectorXd& warm_start) {
  const Eigen::Index n = t.size();
  const Eigen::Index kcp = hinge.cols();
  Eigen::MatrixXd a(n, 2);
  a.col(0) = g;
  a.col(1) = g.cwiseProduct(t);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 2);

  Eigen::MatrixXd z = hinge.array().colwise() * g.array();
  const Eigen::MatrixXd z_perp = z - q * (q.transpose() * z);
  const Eigen::VectorXd y_perp = y - q * (q.transpose() * y);

  TrendSolve out;
  out.delta = warm_start.size() == kcp ? warm_start : Eigen::VectorXd::Zero(kcp);
  Eigen::VectorXd norms = z_perp.colwise().squaredNorm().transpose();
  Eigen::VectorXd resid = y_perp - z_perp * out.delta;
  const double scale = std::max(1.0, y_perp.norm());

  for (int sweep = 0; sweep < config.max_sweeps && kcp > 0; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < kcp; ++j) {
      if (norms(j) < 1e-14) {
        out.delta(j) = 0.0;
        continue;
      }
      const double old = out.delta(j);
      const double rho = z_perp.col(j).dot(resid) + norms(j) * old;
      const double updated = soft_threshold(rho, lambda) / norms(j);
      if (updated != old) {
        resid -= z_perp.col(j) * (updated - old);
        out.delta(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old) * std::sqrt(norms(j)));
      }
    }
    if (max_change <= config.tolerance * scale) break;
  }

  const Eigen::VectorXd rest = y - z * out.delta;
  const Eigen::Vector2d km = qr.solve(rest);
  out.m = km(0);
  out.k = km(1);
  return out;
}

void check_dates(std::span<const SeriesPoint> train) {
  if (train.size() >= 2 && train.front().date == train.back().date) {
    throw Error(ErrorCode::DegenerateDates, "training dates span zero days");
  }
  for (std::size_t i = 1; i < train.size(); ++i) {
    if (!(train[i - 1].date < train[i].date)) {
      throw Error(ErrorCode::InvalidArgument, "trend model needs strictly increasing dates");
    }
  }
}

}  // namespace

double ChangepointTrendModel::scaled_time(Date date) const {
  return static_cast<double>(date.day_number() - origin.day_number()) / span_days;
}

double ChangepointTrendModel::trend_scaled(double t) const {
  double v = k * t + m;
  for (std::size_t j = 0; j < changepoints.size(); ++j) {
    if (t > changepoints[j]) v += deltas[j] * (t - changepoints[j]);
  }
  return v;
}

double ChangepointTrendModel::predict(Date date) const {
  double v = trend_scaled(scaled_time(date));
  if (seasonality_active) {
    const Date one[] = {date};
    const Eigen::MatrixXd s = fourier_features(one, static_cast<int>(seasonal_coef.size() / 2));
    double factor = 1.0;
    for (std::size_t i = 0; i < seasonal_coef.size(); ++i) factor += s(0, static_cast<Eigen::Index>(i)) * seasonal_coef[i];
    v *= factor;
  }
  return v * y_scale;
}

std::vector<double> ChangepointTrendModel::predict(std::span<const Date> dates) const {
  std::vector<double> out;
  out.reserve(dates.size());
  for (Date d : dates) out.push_back(predict(d));
  return out;
}

double ChangepointTrendModel::slope_per_day(Date date) const {
  const double t = scaled_time(date);
  double slope = k;
  for (std::size_t j = 0; j < changepoints.size(); ++j) {
    if (t > changepoints[j]) slope += deltas[j];
  }
  return slope * y_scale / span_days;
}

ChangepointTrendModel fit_trend_fixed_tau(std::span<const SeriesPoint> train, double tau, const TrendConfig& config) {
  if (train.size() < 2) throw Error(ErrorCode::TooFewPoints, "trend model needs at least 2 points");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "changepoint prior scale must be positive");
  check_dates(train);

  const auto n = static_cast<Eigen::Index>(train.size());
  ChangepointTrendModel model;
  model.origin = train.front().date;
  model.span_days = static_cast<double>(train.back().date.day_number() - train.front().date.day_number());
  model.tau = tau;
  model.seasonality = config.seasonality;

  double y_max = 0.0;
  for (const auto& p : train) y_max = std::max(y_max, std::abs(p.value));
  model.y_scale = y_max > 0.0 ? y_max : 1.0;

  Eigen::VectorXd t(n), y(n);
  std::vector<Date> dates;
  dates.reserve(train.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i) = model.scaled_time(train[static_cast<std::size_t>(i)].date);
    y(i) = train[static_cast<std::size_t>(i)].value / model.y_scale;
    dates.push_back(train[static_cast<std::size_t>(i)].date);
  }

  const int kcp = std::max(0, std::min<int>(config.n_changepoints, static_cast<int>(n) - 2));
  model.changepoints.resize(static_cast<std::size_t>(kcp));
  Eigen::MatrixXd hinge(n, kcp);
  for (int j = 0; j < kcp; ++j) {
    const double s = config.changepoint_range * static_cast<double>(j + 1) / static_cast<double>(kcp);
    model.changepoints[static_cast<std::size_t>(j)] = s;
    hinge.col(j) = (t.array() - s).max(0.0).matrix();
  }

  model.seasonality_active = config.seasonality == SeasonalityMode::MultiplicativeYearly &&
                             model.span_days > config.seasonality_min_span_days && config.fourier_order > 0 &&
                             n > 2 * config.fourier_order + 2;
  const Eigen::MatrixXd s =
      model.seasonality_active ? fourier_features(dates, config.fourier_order) : Eigen::MatrixXd(n, 0);

  Eigen::VectorXd g = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd beta;
  TrendSolve solve;
  solve.delta = Eigen::VectorXd::Zero(kcp);
  const auto fitted_values = [&] {
    return (solve.k * t + Eigen::VectorXd::Constant(n, solve.m) + hinge * solve.delta).cwiseProduct(g);
  };

  // Penalized fit for a fixed L1 weight on 0.5 * SSE.
  const auto fit_with = [&](double lambda) {
    solve = solve_weighted_lasso(t, y, g, hinge, lambda, config, solve.delta);
    if (!model.seasonality_active) return;
    // Alternate between the trend (given the seasonal factor) and the seasonal
    // coefficients (given the trend); each step lowers the joint objective.
    double previous = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 50; ++iter) {
      const Eigen::VectorXd trend = solve.k * t + Eigen::VectorXd::Constant(n, solve.m) + hinge * solve.delta;
      const Eigen::MatrixXd ts = s.array().colwise() * trend.array();
      Eigen::MatrixXd normal = ts.transpose() * ts;
      normal.diagonal().array() += 1e-8 * static_cast<double>(n);
      beta = normal.ldlt().solve(ts.transpose() * (y - trend));
      g = Eigen::VectorXd::Ones(n) + s * beta;
      solve = solve_weighted_lasso(t, y, g, hinge, lambda, config, solve.delta);
      const double objective = 0.5 * (y - fitted_values()).squaredNorm() + lambda * solve.delta.lpNorm<1>();
      if (std::abs(previous - objective) <= 1e-10 * (1.0 + std::abs(objective))) break;
      previous = objective;
    }
  };

  // The Laplace prior on the deltas sits against a Gaussian likelihood with
  // unknown noise sigma, so the weight on 0.5 * SSE is sigma^2 / tau. sigma^2 is
  // re-estimated from the residuals until it settles; the floor keeps short,
  // nearly interpolated series regularized.
  const double y_var = (y.array() - y.mean()).square().mean();
  const double sigma2_floor = kNoiseVarianceFloor * y_var + 1e-12;
  double sigma2 = std::max(y_var, sigma2_floor);
  for (int round = 0; round < kMaxNoiseRounds; ++round) {
    fit_with(sigma2 / tau);
    const double next = std::max((y - fitted_values()).squaredNorm() / static_cast<double>(n), sigma2_floor);
    const bool settled = std::abs(next - sigma2) <= 1e-6 * sigma2;
    sigma2 = next;
    if (settled) break;
  }
  if (model.seasonality_active) model.seasonal_coef.assign(beta.data(), beta.data() + beta.size());

  model.k = solve.k;
  model.m = solve.m;
  model.deltas.assign(solve.delta.data(), solve.delta.data() + solve.delta.size());
  return model;
}

TrendFit fit_trend_model(std::span<const SeriesPoint> train, std::span<const Date> horizon_dates,
                         const TrendConfig& config) {
  if (train.size() < 3) throw Error(ErrorCode::TooFewPoints, "trend model needs at least 3 points");
  if (config.tau_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty changepoint prior scale grid");
  check_dates(train);

  TrendFit fit;
  double best_tau = config.tau_grid.front();
  const auto split = train_test_split(train);
  if (split.train.size() >= 2) {
    std::vector<Date> val_dates;
    std::vector<double> val_values;
    for (const auto& p : split.test) {
      val_dates.push_back(p.date);
      val_values.push_back(p.value);
    }
    double best_mad = std::numeric_limits<double>::infinity();
    for (double tau : config.tau_grid) {
      const auto model = fit_trend_fixed_tau(split.train, tau, config);
      const auto predicted = model.predict(val_dates);
      const double score = mad(predicted, val_values);
      fit.validation_mad.push_back(score);
      if (score < best_mad) {
        best_mad = score;
        best_tau = tau;
      }
    }
  }

  fit.model = fit_trend_fixed_tau(train, best_tau, config);
  fit.forecast.model_tag = ModelTag::TREND;
  fit.forecast.values = fit.model.predict(horizon_dates);
  return fit;
}

}  // namespace devrisk
