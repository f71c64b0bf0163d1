#include "nax/features.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace nax {

CalendarFeatures calendar_features(const Date& date, double t,
                                   const HolidayCalendar& holidays) {
    if (t < 0) throw std::invalid_argument("calendar_features: negative day index");
    CalendarFeatures f;
    f.t = t;
    f.sin_w = std::sin(kAnnualOmega * t);
    f.cos_w = std::cos(kAnnualOmega * t);
    f.sin_2w = std::sin(2.0 * kAnnualOmega * t);
    f.cos_2w = std::cos(2.0 * kAnnualOmega * t);
    f.d_sat = date.is_saturday() ? 1.0 : 0.0;
    f.d_sun = date.is_sunday() ? 1.0 : 0.0;
    f.d_hol = holidays.contains(date) ? 1.0 : 0.0;
    return f;
}

std::vector<CalendarFeatures> calendar_features(
    const std::vector<DailyRecord>& days, double t0,
    const HolidayCalendar& holidays) {
    std::vector<CalendarFeatures> out;
    out.reserve(days.size());
    double t = t0;
    for (const auto& d : days) {
        out.push_back(calendar_features(d.date, t, holidays));
        t += 1.0;
    }
    return out;
}

MinMaxScaler MinMaxScaler::fit(const Matrix& training,
                               std::vector<std::string> column_names) {
    if (training.rows() < 2)
        throw std::invalid_argument("MinMaxScaler: need at least 2 training rows");
    MinMaxScaler s;
    const int cols = static_cast<int>(training.cols());
    s.min_.resize(cols);
    s.max_.resize(cols);
    if (column_names.empty())
        for (int c = 0; c < cols; ++c) column_names.push_back("col" + std::to_string(c));
    if (static_cast<int>(column_names.size()) != cols)
        throw std::invalid_argument("MinMaxScaler: column name count mismatch");
    s.names_ = std::move(column_names);
    for (int c = 0; c < cols; ++c) {
        s.min_[c] = training.col(c).minCoeff();
        s.max_[c] = training.col(c).maxCoeff();
        if (!(s.max_[c] > s.min_[c]))
            throw std::invalid_argument("MinMaxScaler: constant column '" +
                                        s.names_[c] + "'");
    }
    return s;
}

Matrix MinMaxScaler::transform(const Matrix& m) const {
    if (m.cols() != columns())
        throw std::invalid_argument("MinMaxScaler::transform: column mismatch");
    Matrix out(m.rows(), m.cols());
    for (int c = 0; c < columns(); ++c)
        out.col(c) = (m.col(c).array() - min_[c]) / (max_[c] - min_[c]);
    return out;
}

Matrix MinMaxScaler::inverse_transform(const Matrix& m) const {
    if (m.cols() != columns())
        throw std::invalid_argument("MinMaxScaler::inverse_transform: column mismatch");
    Matrix out(m.rows(), m.cols());
    for (int c = 0; c < columns(); ++c)
        out.col(c) = m.col(c).array() * (max_[c] - min_[c]) + min_[c];
    return out;
}

Vector MinMaxScaler::transform_column(const Vector& v, int col) const {
    return (v.array() - min_[col]) / (max_[col] - min_[col]);
}

Vector MinMaxScaler::inverse_column(const Vector& v, int col) const {
    return v.array() * (max_[col] - min_[col]) + min_[col];
}

std::string MinMaxScaler::to_json() const {
    nlohmann::ordered_json j;
    for (int c = 0; c < columns(); ++c)
        j[names_[c]] = {{"min", min_[c]}, {"max", max_[c]}};
    return j.dump(2);
}

MinMaxScaler MinMaxScaler::from_json(const std::string& json) {
    auto j = nlohmann::ordered_json::parse(json);
    MinMaxScaler s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        s.names_.push_back(it.key());
        s.min_.push_back(it.value().at("min").get<double>());
        s.max_.push_back(it.value().at("max").get<double>());
    }
    return s;
}

}  // namespace nax
