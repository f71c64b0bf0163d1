#pragma once

#include <chrono>
#include <compare>
#include <set>
#include <stdexcept>
#include <string>

namespace nax {

/// Calendar date (proleptic Gregorian), thin wrapper over std::chrono.
struct Date {
    std::chrono::year_month_day ymd{};

    Date() = default;
    Date(int y, unsigned m, unsigned d)
        : ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}} {
        if (!ymd.ok()) throw std::invalid_argument("invalid date " + to_string());
    }

    static Date from_days(std::chrono::sys_days sd) {
        Date out;
        out.ymd = std::chrono::year_month_day{sd};
        return out;
    }

    std::chrono::sys_days to_days() const { return std::chrono::sys_days{ymd}; }

    int year() const { return static_cast<int>(ymd.year()); }
    unsigned month() const { return static_cast<unsigned>(ymd.month()); }
    unsigned day() const { return static_cast<unsigned>(ymd.day()); }

    bool is_feb29() const { return month() == 2 && day() == 29; }

    /// Monday=1 .. Sunday=7 (ISO).
    unsigned iso_weekday() const {
        return std::chrono::weekday{to_days()}.iso_encoding();
    }
    bool is_saturday() const { return iso_weekday() == 6; }
    bool is_sunday() const { return iso_weekday() == 7; }

    /// Day-of-year in a 365-day calendar: Feb 29 shares index with Feb 28's
    /// successor removed, i.e. dates after Feb 28 in leap years are shifted
    /// back by one so every year maps onto 1..365.
    int day_of_year_365() const {
        auto jan1 = std::chrono::sys_days{std::chrono::year{year()} / 1 / 1};
        int doy = static_cast<int>((to_days() - jan1).count()) + 1;
        bool leap = std::chrono::year{year()}.is_leap();
        if (leap && doy > 59) --doy;  // day 60 is Feb 29 in leap years
        return doy;
    }

    Date next() const { return from_days(to_days() + std::chrono::days{1}); }
    Date plus_days(int n) const { return from_days(to_days() + std::chrono::days{n}); }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u",
                      static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
        return buf;
    }

    /// Parse "YYYY-MM-DD".
    static Date parse(const std::string& s) {
        int y = 0;
        unsigned m = 0, d = 0;
        if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3)
            throw std::invalid_argument("unparseable date: '" + s + "'");
        return Date{y, m, d};
    }

    friend auto operator<=>(const Date& a, const Date& b) {
        return a.to_days() <=> b.to_days();
    }
    friend bool operator==(const Date& a, const Date& b) {
        return a.to_days() == b.to_days();
    }
};

/// Number of Feb 29 dates in the half-open interval [a, b).
inline int feb29_count(const Date& a, const Date& b) {
    if (!(a < b)) return 0;
    int count = 0;
    for (int y = a.year(); y <= b.year(); ++y) {
        if (!std::chrono::year{y}.is_leap()) continue;
        Date f{y, 2, 29};
        if (!(f < a) && f < b) ++count;
    }
    return count;
}

/// Day-count difference on the 365-day calendar (Feb 29 removed).
inline int retained_days_between(const Date& a, const Date& b) {
    return static_cast<int>((b.to_days() - a.to_days()).count()) -
           feb29_count(a, b);
}

/// Set of holiday dates, loaded from a one-date-per-line file or built in.
class HolidayCalendar {
public:
    HolidayCalendar() = default;
    explicit HolidayCalendar(std::set<Date> dates) : dates_(std::move(dates)) {}

    bool contains(const Date& d) const { return dates_.count(d) > 0; }
    void add(const Date& d) { dates_.insert(d); }
    std::size_t size() const { return dates_.size(); }

    static HolidayCalendar load(const std::string& path);

    /// Fixed-date US federal holidays (New Year, Juneteenth from 2021,
    /// Independence Day, Veterans Day, Christmas) over [first_year, last_year].
    static HolidayCalendar us_fixed(int first_year, int last_year);

private:
    std::set<Date> dates_;
};

}  // namespace nax
