#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nax/ingest.hpp"
#include "nax/synthetic.hpp"

using namespace nax;

namespace {

std::vector<HourlyRecord> constant_day(const Date& d, double demand, double dry,
                                       double wet, int hours = 24) {
    std::vector<HourlyRecord> out;
    for (int h = 0; h < hours; ++h)
        out.push_back(HourlyRecord{d, h, demand, dry, wet});
    return out;
}

}  // namespace

TEST_CASE("aggregate_daily: constant 24-hour day") {
    auto hourly = constant_day(Date{2010, 3, 1}, 1000.0, 50.0, 40.0);
    auto days = aggregate_daily(hourly, HolidayCalendar{});
    REQUIRE(days.size() == 1);
    CHECK(days[0].consumption_gwh == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(days[0].dry_bulb_f == doctest::Approx(50.0));
    CHECK(days[0].wet_bulb_f == doctest::Approx(40.0));
}

TEST_CASE("aggregate_daily: random demands match a naive per-row sum") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(100.0, 2000.0);
    std::vector<HourlyRecord> hourly;
    double naive_total = 0;
    Date d{2010, 6, 1};
    for (int day = 0; day < 5; ++day) {
        for (int h = 0; h < 24; ++h) {
            double demand = u(rng);
            naive_total += demand;
            hourly.push_back(HourlyRecord{d, h, demand, 50, 40});
        }
        d = d.next();
    }
    auto days = aggregate_daily(hourly, HolidayCalendar{});
    REQUIRE(days.size() == 5);
    double total = 0;
    for (const auto& r : days) total += r.consumption_gwh;
    CHECK(total * 1000.0 == doctest::Approx(naive_total).epsilon(1e-12));
}

TEST_CASE("aggregate_daily: output length equals distinct dates") {
    std::vector<HourlyRecord> hourly;
    Date d{2011, 1, 1};
    for (int day = 0; day < 10; ++day) {
        auto rows = constant_day(d, 500, 30, 25, day % 3 == 0 ? 20 : 24);
        hourly.insert(hourly.end(), rows.begin(), rows.end());
        d = d.next();
    }
    std::vector<Date> incomplete;
    auto days = aggregate_daily(hourly, HolidayCalendar{}, &incomplete);
    CHECK(days.size() == 10);
    CHECK(incomplete.size() == 4);  // days 0,3,6,9
}

TEST_CASE("aggregate_daily: error paths") {
    CHECK_THROWS_AS(aggregate_daily({}, HolidayCalendar{}), std::invalid_argument);
    auto hourly = constant_day(Date{2010, 1, 2}, 100, 50, 40, 2);
    hourly.push_back(HourlyRecord{Date{2010, 1, 1}, 0, 100, 50, 40});
    CHECK_THROWS_AS(aggregate_daily(hourly, HolidayCalendar{}),
                    std::invalid_argument);
}

TEST_CASE("remove_leap_days") {
    SUBCASE("non-leap year untouched") {
        std::vector<DailyRecord> days;
        for (Date d{2011, 1, 1}; d <= Date{2011, 12, 31}; d = d.next())
            days.push_back(DailyRecord{d, 1.0, 0, 0});
        auto out = remove_leap_days(days);
        CHECK(out.size() == days.size());
    }
    SUBCASE("2012 drops exactly Feb 29") {
        std::vector<DailyRecord> days;
        for (Date d{2012, 1, 1}; d <= Date{2012, 12, 31}; d = d.next())
            days.push_back(DailyRecord{d, 1.0, 0, 0});
        REQUIRE(days.size() == 366);
        auto out = remove_leap_days(days);
        CHECK(out.size() == 365);
        for (const auto& r : out) CHECK_FALSE(r.date.is_feb29());
    }
    SUBCASE("2008-2012 loses exactly two days, survivors untouched") {
        std::vector<DailyRecord> days;
        double c = 1.0;
        for (Date d{2008, 1, 1}; d <= Date{2012, 12, 31}; d = d.next()) {
            days.push_back(DailyRecord{d, c, c + 1, c + 2});
            c += 0.25;
        }
        auto out = remove_leap_days(days);
        CHECK(days.size() - out.size() == 2);
        std::size_t j = 0;
        for (const auto& r : days) {
            if (r.date.is_feb29()) continue;
            CHECK(out[j].consumption_gwh == r.consumption_gwh);
            CHECK(out[j].dry_bulb_f == r.dry_bulb_f);
            ++j;
        }
    }
}

TEST_CASE("log_transform basics and roundtrip") {
    std::vector<DailyRecord> days{
        DailyRecord{Date{2010, 1, 1}, std::exp(1.0), 0, 0},
        DailyRecord{Date{2010, 1, 2}, 1.0, 0, 0}};
    auto s = log_transform(days);
    CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.values[1] == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    std::vector<DailyRecord> rnd;
    Date d{2010, 1, 1};
    for (int i = 0; i < 200; ++i) {
        rnd.push_back(DailyRecord{d, u(rng), 0, 0});
        d = d.next();
    }
    auto sr = log_transform(rnd);
    for (int i = 0; i < 200; ++i)
        CHECK(std::exp(sr.values[i]) ==
              doctest::Approx(rnd[i].consumption_gwh).epsilon(1e-12));

    days[0].consumption_gwh = -1.0;
    CHECK_THROWS_AS(log_transform(days), std::domain_error);
}

TEST_CASE("treat_outliers") {
    const int n = 400;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 0.1);

    LogSeries series;
    Vector resid(n);
    Date d{2010, 1, 1};
    for (int i = 0; i < n; ++i) {
        resid[i] = g(rng);
        series.dates.push_back(d);
        d = d.next();
    }
    series.values = resid;  // values only shift where winsorized

    SUBCASE("all within 3 sigma: untouched, empty report") {
        Vector before = series.values;
        auto report = treat_outliers(series, resid);
        CHECK(report.winsorized_dates.empty());
        CHECK((series.values - before).norm() == 0.0);
    }
    SUBCASE("one planted 10-sigma spike is the only report entry") {
        Vector spiked = resid;
        double sd = std::sqrt((spiked.array() - spiked.mean()).square().sum() /
                              (n - 1));
        spiked[123] = 10.0 * sd;
        LogSeries s2 = series;
        s2.values = spiked;
        auto report = treat_outliers(s2, spiked);
        REQUIRE(report.winsorized_dates.size() == 1);
        CHECK(report.winsorized_dates[0] == series.dates[123]);
    }
    SUBCASE("empty residual series is an error") {
        LogSeries empty;
        Vector none;
        CHECK_THROWS_AS(treat_outliers(empty, none), std::invalid_argument);
    }
}

TEST_CASE("synthetic generator") {
    HolidayCalendar holidays = HolidayCalendar::us_fixed(2007, 2012);
    SyntheticConfig cfg;
    cfg.first = Date{2008, 1, 1};
    cfg.last = Date{2009, 12, 31};
    cfg.seed = 42;

    SUBCASE("zero noise: consumption is exactly exp(trend + seasonality)") {
        SyntheticConfig c = cfg;
        c.zero_noise = true;
        auto data = generate_synthetic(c, holidays);
        for (std::size_t i = 0; i < data.days.size(); ++i)
            CHECK(data.days[i].consumption_gwh ==
                  doctest::Approx(std::exp(data.truth.trend_seasonality[i]))
                      .epsilon(1e-14));
    }
    SUBCASE("same seed reproduces bit-identical series") {
        auto a = generate_synthetic(cfg, holidays);
        auto b = generate_synthetic(cfg, holidays);
        REQUIRE(a.days.size() == b.days.size());
        for (std::size_t i = 0; i < a.days.size(); ++i) {
            CHECK(a.days[i].consumption_gwh == b.days[i].consumption_gwh);
            CHECK(a.days[i].dry_bulb_f == b.days[i].dry_bulb_f);
        }
    }
    SUBCASE("no Feb 29, invalid range rejected") {
        SyntheticConfig c = cfg;
        c.first = Date{2012, 1, 1};
        c.last = Date{2012, 12, 31};
        auto data = generate_synthetic(c, holidays);
        CHECK(data.days.size() == 365);
        c.last = Date{2011, 1, 1};
        CHECK_THROWS_AS(generate_synthetic(c, holidays), std::invalid_argument);
    }
}

TEST_CASE("segmentation ordering enforced") {
    Segmentation s;
    s.calibration = {Date{2007, 1, 1}, Date{2010, 12, 31}};
    s.validation = {Date{2011, 1, 1}, Date{2011, 12, 31}};
    s.test = {Date{2012, 1, 1}, Date{2012, 12, 31}};
    CHECK_NOTHROW(s.validate());
    s.validation.first = Date{2010, 6, 1};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
