#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nax/features.hpp"

using namespace nax;

TEST_CASE("calendar_features harmonics") {
    HolidayCalendar holidays;
    auto f0 = calendar_features(Date{2008, 1, 2}, 0.0, holidays);  // a Wednesday
    CHECK(f0.sin_w == 0.0);
    CHECK(f0.cos_w == 1.0);
    CHECK(f0.sin_2w == 0.0);
    CHECK(f0.cos_2w == 1.0);
    CHECK(f0.d_sat == 0.0);
    CHECK(f0.d_sun == 0.0);

    auto f365 = calendar_features(Date{2009, 1, 1}, 365.0, holidays);
    CHECK(f365.sin_w == doctest::Approx(f0.sin_w).epsilon(1e-9));
    CHECK(f365.cos_w == doctest::Approx(f0.cos_w).epsilon(1e-9));

    // sin^2 + cos^2 = 1 per harmonic at arbitrary t.
    for (double t : {13.0, 200.5, 999.0}) {
        auto f = calendar_features(Date{2010, 5, 5}, t, holidays);
        CHECK(f.sin_w * f.sin_w + f.cos_w * f.cos_w ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.sin_2w * f.sin_2w + f.cos_2w * f.cos_2w ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("calendar_features dummies") {
    HolidayCalendar holidays = HolidayCalendar::us_fixed(2010, 2010);
    auto sat = calendar_features(Date{2010, 1, 2}, 1.0, holidays);  // Saturday
    CHECK(sat.d_sat == 1.0);
    CHECK(sat.d_sun == 0.0);
    auto sun = calendar_features(Date{2010, 1, 3}, 2.0, holidays);
    CHECK(sun.d_sun == 1.0);
    CHECK(sun.d_sat == 0.0);
    auto hol = calendar_features(Date{2010, 7, 4}, 0.0, holidays);  // a Sunday too
    CHECK(hol.d_hol == 1.0);
    CHECK(hol.d_sun == 1.0);
    CHECK_THROWS_AS(calendar_features(Date{2010, 1, 1}, -1.0, holidays),
                    std::invalid_argument);
}

TEST_CASE("MinMaxScaler fit and transform") {
    Matrix m(2, 1);
    m << 0.0, 10.0;
    auto s = MinMaxScaler::fit(m);
    CHECK(s.col_min(0) == 0.0);
    CHECK(s.col_max(0) == 10.0);
    Matrix t = s.transform(m);
    CHECK(t(0, 0) == 0.0);
    CHECK(t(1, 0) == 1.0);

    SUBCASE("constant column rejected") {
        Matrix c(3, 1);
        c << 2.0, 2.0, 2.0;
        CHECK_THROWS_AS(MinMaxScaler::fit(c), std::invalid_argument);
    }
    SUBCASE("out-of-range value maps above 1 and roundtrips") {
        Matrix v(1, 1);
        v << 12.0;
        Matrix tv = s.transform(v);
        CHECK(tv(0, 0) > 1.0);
        CHECK(s.inverse_transform(tv)(0, 0) == doctest::Approx(12.0).epsilon(1e-12));
    }
    SUBCASE("column mismatch is an error") {
        Matrix wrong(1, 2);
        wrong << 1.0, 2.0;
        CHECK_THROWS_AS(s.transform(wrong), std::invalid_argument);
    }
}

TEST_CASE("MinMaxScaler roundtrip property on random matrices") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix m(30, 4);
        for (int r = 0; r < 30; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = u(rng);
        auto s = MinMaxScaler::fit(m);
        Matrix back = s.inverse_transform(s.transform(m));
        CHECK((back - m).cwiseAbs().maxCoeff() < 1e-12 * 50.0);
    }
}

TEST_CASE("scaler parameters depend only on training rows") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix train(50, 3);
    for (int r = 0; r < 50; ++r)
        for (int c = 0; c < 3; ++c) train(r, c) = u(rng);
    auto a = MinMaxScaler::fit(train);
    auto b = MinMaxScaler::fit(train);  // refit; appended rows never enter fit
    for (int c = 0; c < 3; ++c) {
        CHECK(a.col_min(c) == b.col_min(c));
        CHECK(a.col_max(c) == b.col_max(c));
    }
}

TEST_CASE("scaler JSON serialization roundtrip") {
    Matrix m(3, 2);
    m << 1.0, -4.0, 5.0, 2.5, 3.0, 0.0;
    auto s = MinMaxScaler::fit(m, {"alpha", "beta"});
    auto s2 = MinMaxScaler::from_json(s.to_json());
    REQUIRE(s2.columns() == 2);
    CHECK(s2.col_min(0) == s.col_min(0));
    CHECK(s2.col_max(1) == s.col_max(1));
}
