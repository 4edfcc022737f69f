#pragma once

#include <span>

namespace devrisk {

struct AdfResult {
  /// t-ratio of the lagged level coefficient.
  double statistic = 0.0;
  bool reject_unit_root = false;
  int lags = 0;
  /// Regression rows actually used.
  int nobs = 0;
  double critical_value_5pct = 0.0;
  /// True when the regression was singular (e.g. a constant series).
  bool degenerate = false;
};

enum class AdfLevel { OnePercent, FivePercent, TenPercent };

/// MacKinnon response-surface critical value for the constant-only
/// Dickey-Fuller regression with `nobs` observations.
double mackinnon_critical_value(int nobs, AdfLevel level = AdfLevel::FivePercent);

/// Schwert rule floor(12 * (n / 100)^(1/4)).
int schwert_max_lag(std::size_t n);

/// How the number of lagged differences is chosen. Both start from the
/// Schwert lag, reduced until at least eight residual degrees of freedom remain.
enum class AdfLagRule {
  /// Use that lag directly.
  Fixed,
  /// Treat it as an upper bound and pick the AIC minimizer over 0..L on a
  /// common sample, then refit on all usable rows.
  Aic,
};

/// Augmented Dickey-Fuller test, regression of dy_t on (1, y_{t-1},
/// dy_{t-1}..dy_{t-L}). Throws TooShort for n < 10.
AdfResult adf_test(std::span<const double> series, AdfLagRule rule = AdfLagRule::Aic);

}  // namespace devrisk
