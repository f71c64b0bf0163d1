#pragma once

#include "nax/forecast.hpp"
#include "nax/glm.hpp"
#include "nax/model.hpp"

namespace nax {

/// Linear autoregressive benchmark: OLS on the trend/seasonality design
/// augmented with one lag of the log series and the two temperatures.
/// Homoskedastic Gaussian residual model.
struct ArxFit {
    Vector beta;              // [9 design columns, Y_{t-1}, dry, wet]
    double residual_variance = 0;  // > 0
    Vector fitted;            // aligned with rows 1..T-1 of the input
    Vector residuals;
    double last_observed_y = 0;    // Y_T of the training series
    double t_origin = 0;           // day index of the first training day
    Date train_first;

    static constexpr int kArCoeff = 9;
    static constexpr int kDryCoeff = 10;
    static constexpr int kWetCoeff = 11;
};

ArxFit fit_arx(const LogSeries& series, const std::vector<DailyRecord>& days,
               double t0, const HolidayCalendar& holidays);

/// Iterated one-step recursion feeding the predicted mean as the next lag.
/// h-step predictive variance of the AR(1) recursion:
/// sigma^2 * sum_{j<h} phi^(2j).
DensityForecast forecast_arx(const ArxFit& fit,
                             const std::vector<ForecastDay>& horizon,
                             const HolidayCalendar& holidays);

/// GLM-only benchmark: mean T_t + S_t, constant sigma from the training
/// residual standard deviation. Rejects a degenerate zero-residual fit.
DensityForecast forecast_glm_density(const GlmFit& fit,
                                     const std::vector<ForecastDay>& horizon,
                                     double t0,
                                     const HolidayCalendar& holidays);

}  // namespace nax
