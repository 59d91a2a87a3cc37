#ifndef RAINBC_SEASONAL_HPP
#define RAINBC_SEASONAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "rainbc/series.hpp"
#include "rainbc/stats.hpp"

namespace rainbc::seasonal {

struct SeasonalModelSpec {
    enum class Response { Occurrence, Amount };
    int order = 0;  // 0 or 1 (adds previous-day state)
    Response response = Response::Occurrence;
    int n_harmonics = 3;
    int day_origin_month = 8;  // cycle day 1 = August 1
};

struct GlmFit {
    std::vector<double> coef;
    int iterations = 0;
    double gradient_norm = 0.0;
    double dispersion = 1.0;  // Pearson estimate (Gamma response only)
};

/// Fitted seasonal curves over the 366-day cycle; order 1 carries one curve
/// per previous-day state.
struct FittedCurves {
    int order = 0;
    SeasonalModelSpec::Response response = SeasonalModelSpec::Response::Occurrence;
    std::vector<double> all;  // order 0, 366 values
    std::vector<double> wet;  // order 1
    std::vector<double> dry;
    GlmFit fit_all, fit_wet, fit_dry;
};

/// [1, sin(2*pi*k*d/366), cos(2*pi*k*d/366)] for k = 1..n_harmonics.
std::vector<double> fourier_design(int day, int n_harmonics);

/// Position of a date in the canonical 366-day year starting at the origin
/// month; Feb 29 has its own slot.
int day_of_cycle(const Date& d, int origin_month);

FittedCurves fit_occurrence_model(const IndicatorSeries& indicator,
                                  const std::vector<WetState>& lagged,
                                  const SeasonalModelSpec& spec);

FittedCurves fit_amount_model(const DailySeries& series,
                              const IndicatorSeries& indicator,
                              const std::vector<WetState>& lagged,
                              const SeasonalModelSpec& spec, double t_x);

/// Root-mean-square distance between fitted curves over the full cycle.
/// One value for order 0, {wet, dry} for order 1.
std::vector<double> rmse_curve(const FittedCurves& a, const FittedCurves& b);

/// CSV form: header `d,state,fitted` with state `all` (order 0) or `W`/`D`.
std::string curves_csv(const FittedCurves& curves);

// Exposed for gradient cross-checks in tests.
double logistic_loglik(const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y,
                       const std::vector<double>& beta);
std::vector<double> logistic_gradient(const std::vector<std::vector<double>>& x,
                                      const std::vector<double>& y,
                                      const std::vector<double>& beta);
GlmFit logistic_irls(const std::vector<std::vector<double>>& x,
                     const std::vector<double>& y);
GlmFit gamma_log_irls(const std::vector<std::vector<double>>& x,
                      const std::vector<double>& y);

}  // namespace rainbc::seasonal

#endif
