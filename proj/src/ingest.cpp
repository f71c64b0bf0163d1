#include "nax/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nax {

void Segmentation::validate() const {
    auto check = [](const DateRange& r, const char* name) {
        if (r.first > r.last)
            throw std::invalid_argument(std::string("segmentation range '") +
                                        name + "' is empty or reversed");
    };
    check(calibration, "calibration");
    check(validation, "validation");
    check(test, "test");
    if (!(calibration.last < validation.first))
        throw std::invalid_argument("calibration must precede validation");
    if (!(validation.last < test.first))
        throw std::invalid_argument("validation must precede test");
    Date prev_last = test.last;
    for (const auto& r : robustness) {
        check(r, "robustness");
        if (!(prev_last < r.first))
            throw std::invalid_argument("robustness ranges must follow test, in order");
        prev_last = r.last;
    }
}

std::vector<DailyRecord> aggregate_daily(const std::vector<HourlyRecord>& hourly,
                                         const HolidayCalendar& holidays,
                                         std::vector<Date>* incomplete_days) {
    if (hourly.empty()) throw std::invalid_argument("aggregate_daily: empty input");
    for (std::size_t i = 1; i < hourly.size(); ++i) {
        const auto& a = hourly[i - 1];
        const auto& b = hourly[i];
        if (b.date < a.date || (b.date == a.date && b.hour <= a.hour))
            throw std::invalid_argument(
                "aggregate_daily: non-monotone timestamps at row " + std::to_string(i));
    }

    std::vector<DailyRecord> out;
    std::size_t i = 0;
    while (i < hourly.size()) {
        const Date day = hourly[i].date;
        double demand = 0, dry = 0, wet = 0;
        int count = 0;
        for (; i < hourly.size() && hourly[i].date == day; ++i) {
            demand += hourly[i].demand_mwh;
            dry += hourly[i].dry_bulb_f;
            wet += hourly[i].wet_bulb_f;
            ++count;
        }
        if (count < 24 && incomplete_days) incomplete_days->push_back(day);
        DailyRecord rec;
        rec.date = day;
        rec.consumption_gwh = demand / 1000.0;  // MWh -> GWh
        rec.dry_bulb_f = dry / count;
        rec.wet_bulb_f = wet / count;
        rec.is_saturday = day.is_saturday();
        rec.is_sunday = day.is_sunday();
        rec.is_holiday = holidays.contains(day);
        out.push_back(rec);
    }
    return out;
}

std::vector<DailyRecord> remove_leap_days(const std::vector<DailyRecord>& days) {
    std::vector<DailyRecord> out;
    out.reserve(days.size());
    for (const auto& d : days)
        if (!d.date.is_feb29()) out.push_back(d);
    return out;
}

LogSeries log_transform(const std::vector<DailyRecord>& days) {
    LogSeries s;
    s.dates.reserve(days.size());
    s.values.resize(static_cast<Eigen::Index>(days.size()));
    for (std::size_t i = 0; i < days.size(); ++i) {
        if (!(days[i].consumption_gwh > 0))
            throw std::domain_error("log_transform: nonpositive consumption on " +
                                    days[i].date.to_string());
        s.dates.push_back(days[i].date);
        s.values[static_cast<Eigen::Index>(i)] = std::log(days[i].consumption_gwh);
    }
    return s;
}

OutlierReport treat_outliers(LogSeries& series, const Vector& glm_residuals) {
    if (glm_residuals.size() == 0)
        throw std::invalid_argument("treat_outliers: empty residual series");
    if (static_cast<std::size_t>(glm_residuals.size()) != series.size())
        throw std::invalid_argument("treat_outliers: residuals not aligned with series");

    const Eigen::Index n = glm_residuals.size();
    const double mean = glm_residuals.mean();
    const double sd = n > 1
        ? std::sqrt((glm_residuals.array() - mean).square().sum() / double(n - 1))
        : 0.0;

    OutlierReport report;
    report.threshold = 3.0 * sd;
    if (sd == 0.0) return report;

    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = glm_residuals[i];
        if (std::abs(r) > report.threshold) {
            const double clipped = r > 0 ? report.threshold : -report.threshold;
            series.values[i] += clipped - r;
            report.winsorized_dates.push_back(series.dates[static_cast<std::size_t>(i)]);
        }
    }
    return report;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed CSV value '" + s + "' at line " +
                                 std::to_string(line_no));
    }
}

}  // namespace

std::vector<HourlyRecord> read_hourly_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);

    std::vector<HourlyRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 5)
            throw std::runtime_error("expected 5 fields at line " +
                                     std::to_string(line_no) + " of " + path);
        HourlyRecord r;
        r.date = Date::parse(f[0]);
        r.hour = static_cast<int>(parse_double(f[1], line_no));
        if (r.hour < 0 || r.hour > 23)
            throw std::runtime_error("hour out of range at line " + std::to_string(line_no));
        r.demand_mwh = parse_double(f[2], line_no);
        if (r.demand_mwh < 0)
            throw std::runtime_error("negative demand at line " + std::to_string(line_no));
        r.dry_bulb_f = parse_double(f[3], line_no);
        r.wet_bulb_f = parse_double(f[4], line_no);
        out.push_back(r);
    }
    return out;
}

std::vector<DailyRecord> read_daily_csv(const std::string& path,
                                        const HolidayCalendar& holidays) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);

    std::vector<DailyRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 4)
            throw std::runtime_error("expected 4 fields at line " +
                                     std::to_string(line_no) + " of " + path);
        DailyRecord r;
        r.date = Date::parse(f[0]);
        r.consumption_gwh = parse_double(f[1], line_no);
        r.dry_bulb_f = parse_double(f[2], line_no);
        r.wet_bulb_f = parse_double(f[3], line_no);
        r.is_saturday = r.date.is_saturday();
        r.is_sunday = r.date.is_sunday();
        r.is_holiday = holidays.contains(r.date);
        out.push_back(r);
    }
    return out;
}

void write_daily_csv(const std::string& path, const std::vector<DailyRecord>& days) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "date,consumption_gwh,dry_bulb_f,wet_bulb_f\n";
    out.precision(12);
    for (const auto& d : days)
        out << d.date.to_string() << ',' << d.consumption_gwh << ','
            << d.dry_bulb_f << ',' << d.wet_bulb_f << '\n';
}

std::vector<DailyRecord> slice(const std::vector<DailyRecord>& days,
                               const DateRange& range) {
    std::vector<DailyRecord> out;
    for (const auto& d : days)
        if (range.contains(d.date)) out.push_back(d);
    return out;
}

}  // namespace nax
