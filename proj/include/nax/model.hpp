#pragma once

#include <string>
#include <vector>

#include "nax/features.hpp"
#include "nax/glm.hpp"
#include "nax/ingest.hpp"
#include "nax/nax.hpp"

namespace nax {

/// One out-of-sample day as seen by the forecaster: weather and calendar
/// only. Consumption deliberately has no field here; the ex-post stage
/// cannot read it.
struct ForecastDay {
    Date date;
    double dry_bulb_f = 0;
    double wet_bulb_f = 0;
};

ForecastDay to_forecast_day(const DailyRecord& d);
std::vector<ForecastDay> to_forecast_days(const std::vector<DailyRecord>& days);

/// Column layout of the network's exogenous input matrix:
/// [dry, wet, t, sin wt, cos wt, sin 2wt, cos 2wt, d_sat, d_sun, d_hol].
/// The scaler additionally holds the residual target as column 10.
inline constexpr int kExogenousInputs = 10;
inline constexpr int kTargetColumn = 10;

Matrix build_input_matrix(const std::vector<ForecastDay>& days, double t0,
                          const HolidayCalendar& holidays);

/// The full trained artifact: regression layer, network weights, the
/// training-window scaler, and the recurrence state at the training end.
struct TrainedModel {
    GlmCoefficients glm;
    NaxConfig config;
    NaxParams params;
    MinMaxScaler scaler;           // 11 columns (inputs + residual target)
    Eigen::Vector2d boundary_feedback{0, 0};
    Date train_first;              // t = t_origin on this date
    Date train_last;
    double t_origin = 0;           // day index of train_first

    std::string to_json() const;
    static TrainedModel from_json(const std::string& json);
    void save(const std::string& path) const;
    static TrainedModel load(const std::string& path);
};

/// Fit the regression layer and train the network on one training window.
/// Validation data, when given, drives early stopping only.
TrainedModel calibrate(const NaxConfig& config,
                       const std::vector<DailyRecord>& training_days,
                       double t0, const HolidayCalendar& holidays,
                       const std::vector<DailyRecord>* validation_days = nullptr);

}  // namespace nax
