#include "nax/dates.hpp"

#include <fstream>

namespace nax {

HolidayCalendar HolidayCalendar::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open holiday file: " + path);
    std::set<Date> dates;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        dates.insert(Date::parse(line));
    }
    return HolidayCalendar{std::move(dates)};
}

HolidayCalendar HolidayCalendar::us_fixed(int first_year, int last_year) {
    std::set<Date> dates;
    for (int y = first_year; y <= last_year; ++y) {
        dates.insert(Date{y, 1, 1});    // New Year's Day
        dates.insert(Date{y, 7, 4});    // Independence Day
        dates.insert(Date{y, 11, 11});  // Veterans Day
        dates.insert(Date{y, 12, 25});  // Christmas
        if (y >= 2021) dates.insert(Date{y, 6, 19});  // Juneteenth
    }
    return HolidayCalendar{std::move(dates)};
}

}  // namespace nax
