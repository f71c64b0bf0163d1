#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nax/dates.hpp"
#include "nax/types.hpp"

namespace nax {

/// One raw feed row: hour-of-day demand and weather.
struct HourlyRecord {
    Date date;
    int hour = 0;          // 0..23
    double demand_mwh = 0; // >= 0
    double dry_bulb_f = 0;
    double wet_bulb_f = 0;
};

/// One retained calendar day after aggregation.
struct DailyRecord {
    Date date;
    double consumption_gwh = 0;  // > 0
    double dry_bulb_f = 0;       // daily mean
    double wet_bulb_f = 0;       // daily mean
    bool is_saturday = false;
    bool is_sunday = false;
    bool is_holiday = false;
};

/// Contiguous, disjoint, ordered date windows of the experiment protocol.
struct DateRange {
    Date first;
    Date last;  // inclusive

    bool contains(const Date& d) const { return d >= first && d <= last; }
    int length_days() const {
        return static_cast<int>((last.to_days() - first.to_days()).count()) + 1;
    }
};

struct Segmentation {
    DateRange calibration;
    DateRange validation;
    DateRange test;
    std::vector<DateRange> robustness;

    void validate() const;  // throws on overlap or disorder
};

/// Y_t = ln(consumption_t), with t starting at 0 on the first retained day.
struct LogSeries {
    std::vector<Date> dates;
    Vector values;  // Y_t
    // t index is positional: t = i for dates[i].

    std::size_t size() const { return dates.size(); }
};

struct OutlierReport {
    std::vector<Date> winsorized_dates;
    double threshold = 0;  // 3 * sample sd of residuals
};

/// Sum hourly demand (MWh -> GWh) and average temperatures per day.
/// Days with fewer than 24 rows are aggregated from what is present and
/// their dates appended to `incomplete_days` when the caller passes one.
std::vector<DailyRecord> aggregate_daily(
    const std::vector<HourlyRecord>& hourly, const HolidayCalendar& holidays,
    std::vector<Date>* incomplete_days = nullptr);

std::vector<DailyRecord> remove_leap_days(const std::vector<DailyRecord>& days);

LogSeries log_transform(const std::vector<DailyRecord>& days);

/// Winsorize log values whose deseasonalized residual exceeds 3 sample
/// standard deviations, one pass. Residuals must align with the series.
OutlierReport treat_outliers(LogSeries& series, const Vector& glm_residuals);

/// CSV readers for the two input schemas plus the daily writer.
std::vector<HourlyRecord> read_hourly_csv(const std::string& path);
std::vector<DailyRecord> read_daily_csv(const std::string& path,
                                        const HolidayCalendar& holidays);
void write_daily_csv(const std::string& path,
                     const std::vector<DailyRecord>& days);

/// Slice helpers over date-sorted daily records.
std::vector<DailyRecord> slice(const std::vector<DailyRecord>& days,
                               const DateRange& range);

}  // namespace nax
