#pragma once

#include <cstdint>
#include <vector>

#include "nax/ingest.hpp"

namespace nax {

/// Generator for a data set with fully known ground truth: a planted
/// trend/seasonality layer, sinusoidal temperatures, and a planted
/// temperature-driven residual response with seasonal heteroskedasticity.
struct SyntheticConfig {
    Date first{2007, 1, 1};
    Date last{2012, 12, 31};

    // Planted coefficients in the order
    // [intercept, trend, sin w, cos w, sin 2w, cos 2w, d_sat, d_sun, d_hol].
    std::array<double, 9> beta{5.8, 1e-4, -0.02, -0.08, 0.10, -0.04,
                               -0.12, -0.146, -0.06};

    // Temperature model: mean + annual harmonic + iid noise (deg F).
    double dry_mean = 50.0, dry_amp = 25.0, dry_noise_sd = 5.0;
    double wet_mean = 38.0, wet_amp = 22.0, wet_noise_sd = 5.0;

    // Residual response: mu = a_dry * c + a_dry2 * c^2 with
    // c = (dry - dry_mean) / dry_amp;  sigma = sigma0 + sigma1 * c^2.
    double a_dry = 0.02;
    double a_dry2 = 0.06;
    double sigma0 = 0.012;
    double sigma1 = 0.025;

    // Set true for a deterministic series (all noise terms off).
    bool zero_noise = false;

    std::uint64_t seed = 0;
};

struct SyntheticTruth {
    Vector trend_seasonality;  // T_t + S_t per day
    Vector residual_mean;      // planted mu_t
    Vector residual_sd;        // planted sigma_t
};

struct SyntheticData {
    std::vector<DailyRecord> days;  // leap days already absent
    SyntheticTruth truth;
};

SyntheticData generate_synthetic(const SyntheticConfig& config,
                                 const HolidayCalendar& holidays);

/// Expand daily records into a 24-row-per-day hourly feed (equal split of
/// demand, flat temperatures); exercises the hourly ingestion path.
std::vector<HourlyRecord> expand_hourly(const std::vector<DailyRecord>& days);

}  // namespace nax
