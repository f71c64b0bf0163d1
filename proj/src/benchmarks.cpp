#include "nax/benchmarks.hpp"

#include <cmath>

namespace nax {

ArxFit fit_arx(const LogSeries& series, const std::vector<DailyRecord>& days,
               double t0, const HolidayCalendar& holidays) {
    const auto n = static_cast<Eigen::Index>(series.size());
    if (n < 2) throw std::invalid_argument("fit_arx: need at least 2 observations");
    if (days.size() != series.size())
        throw std::invalid_argument("fit_arx: series/days misaligned");

    // First observation dropped: no lag available.
    auto cal = calendar_features(days, t0, holidays);
    Matrix base = build_design_matrix(cal);
    Matrix X(n - 1, kGlmColumns + 3);
    Vector y(n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
        X.row(i - 1).head(kGlmColumns) = base.row(i);
        X(i - 1, ArxFit::kArCoeff) = series.values[i - 1];
        X(i - 1, ArxFit::kDryCoeff) = days[static_cast<std::size_t>(i)].dry_bulb_f;
        X(i - 1, ArxFit::kWetCoeff) = days[static_cast<std::size_t>(i)].wet_bulb_f;
        y[i - 1] = series.values[i];
    }

    GlmFit ols = fit_ols(X, y);
    ArxFit fit;
    fit.beta = ols.coefficients.beta;
    fit.fitted = ols.fitted;
    fit.residuals = ols.residuals;
    fit.residual_variance = ols.residual_variance;
    fit.last_observed_y = series.values[n - 1];
    fit.t_origin = t0;
    fit.train_first = days.front().date;
    return fit;
}

DensityForecast forecast_arx(const ArxFit& fit,
                             const std::vector<ForecastDay>& horizon,
                             const HolidayCalendar& holidays) {
    const double phi = fit.beta[ArxFit::kArCoeff];
    const double t0 =
        fit.t_origin + retained_days_between(fit.train_first, horizon.front().date);

    DensityForecast fc;
    fc.days.reserve(horizon.size());
    double lag = fit.last_observed_y;
    double var = 0;      // h-step predictive variance of the AR(1) recursion
    double phi_pow = 1;  // phi^(2(h-1)) accumulator
    for (std::size_t i = 0; i < horizon.size(); ++i) {
        CalendarFeatures cf =
            calendar_features(horizon[i].date, t0 + static_cast<double>(i), holidays);
        std::vector<CalendarFeatures> one{cf};
        Matrix base = build_design_matrix(one);
        double mean = base.row(0).dot(fit.beta.head(kGlmColumns));
        mean += phi * lag;
        mean += fit.beta[ArxFit::kDryCoeff] * horizon[i].dry_bulb_f;
        mean += fit.beta[ArxFit::kWetCoeff] * horizon[i].wet_bulb_f;

        var += fit.residual_variance * phi_pow;
        phi_pow *= phi * phi;

        const double sigma = std::sqrt(var);
        if (!(sigma > 0))
            throw std::runtime_error("forecast_arx: degenerate zero variance");
        fc.days.push_back(DensityDay{horizon[i].date, mean, sigma});
        lag = mean;  // iterated recursion feeds the predicted mean
    }
    return fc;
}

DensityForecast forecast_glm_density(const GlmFit& fit,
                                     const std::vector<ForecastDay>& horizon,
                                     double t0,
                                     const HolidayCalendar& holidays) {
    const double sigma = std::sqrt(fit.residual_variance);
    if (!(sigma > 0))
        throw std::domain_error(
            "forecast_glm_density: zero residual variance, no density");

    std::vector<CalendarFeatures> cal;
    cal.reserve(horizon.size());
    for (std::size_t i = 0; i < horizon.size(); ++i)
        cal.push_back(calendar_features(horizon[i].date,
                                        t0 + static_cast<double>(i), holidays));
    Vector mean = glm_predict(fit.coefficients, cal);

    DensityForecast fc;
    fc.days.reserve(horizon.size());
    for (std::size_t i = 0; i < horizon.size(); ++i)
        fc.days.push_back(DensityDay{horizon[i].date,
                                     mean[static_cast<Eigen::Index>(i)], sigma});
    return fc;
}

}  // namespace nax
