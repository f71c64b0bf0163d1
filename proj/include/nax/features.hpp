#pragma once

#include <string>
#include <vector>

#include "nax/ingest.hpp"
#include "nax/types.hpp"

namespace nax {

inline constexpr double kAnnualOmega = 2.0 * 3.14159265358979323846 / 365.0;

/// The eight calendar inputs shared by the regression layer and the
/// network: raw day count, two harmonics, and the weekend/holiday dummies.
struct CalendarFeatures {
    double t = 0;
    double sin_w = 0, cos_w = 1;
    double sin_2w = 0, cos_2w = 1;
    double d_sat = 0, d_sun = 0, d_hol = 0;

    static constexpr int kCount = 8;
    void write_to(double* dst) const {
        dst[0] = t;
        dst[1] = sin_w;
        dst[2] = cos_w;
        dst[3] = sin_2w;
        dst[4] = cos_2w;
        dst[5] = d_sat;
        dst[6] = d_sun;
        dst[7] = d_hol;
    }
};

CalendarFeatures calendar_features(const Date& date, double t,
                                   const HolidayCalendar& holidays);

std::vector<CalendarFeatures> calendar_features(
    const std::vector<DailyRecord>& days, double t0,
    const HolidayCalendar& holidays);

/// Per-column min-max normalization anchored to the training window.
/// Immutable after fitting; transform maps training columns onto [0,1].
class MinMaxScaler {
public:
    MinMaxScaler() = default;

    /// Column-wise min/max of the training rows. Throws on a constant column.
    static MinMaxScaler fit(const Matrix& training,
                            std::vector<std::string> column_names = {});

    Matrix transform(const Matrix& m) const;
    Matrix inverse_transform(const Matrix& m) const;
    Vector transform_column(const Vector& v, int col) const;
    Vector inverse_column(const Vector& v, int col) const;

    double scale_value(double x, int col) const {
        return (x - min_[col]) / (max_[col] - min_[col]);
    }
    double unscale_value(double x, int col) const {
        return x * (max_[col] - min_[col]) + min_[col];
    }
    /// Back-transform of a spread (no offset), for standard deviations.
    double unscale_spread(double s, int col) const {
        return s * (max_[col] - min_[col]);
    }

    int columns() const { return static_cast<int>(min_.size()); }
    double col_min(int c) const { return min_[c]; }
    double col_max(int c) const { return max_[c]; }

    std::string to_json() const;
    static MinMaxScaler from_json(const std::string& json);

private:
    std::vector<double> min_, max_;
    std::vector<std::string> names_;
};

}  // namespace nax
