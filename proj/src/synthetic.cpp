#include "nax/synthetic.hpp"

#include <cmath>
#include <random>

#include "nax/features.hpp"
#include "nax/rng.hpp"

namespace nax {

SyntheticData generate_synthetic(const SyntheticConfig& config,
                                 const HolidayCalendar& holidays) {
    if (config.last < config.first)
        throw std::invalid_argument("generate_synthetic: invalid date range");

    auto temp_rng = make_rng(config.seed, "synthetic-temperature");
    auto resid_rng = make_rng(config.seed, "synthetic-residual");
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticData data;
    std::vector<double> ts, rmu, rsd;

    double t = 0;
    for (Date d = config.first; d <= config.last; d = d.next()) {
        if (d.is_feb29()) continue;

        const double phase = kAnnualOmega * t;
        double dry = config.dry_mean - config.dry_amp * std::cos(phase);
        double wet = config.wet_mean - config.wet_amp * std::cos(phase);
        if (!config.zero_noise) {
            dry += config.dry_noise_sd * gauss(temp_rng);
            wet += config.wet_noise_sd * gauss(temp_rng);
        }

        CalendarFeatures cf = calendar_features(d, t, holidays);
        double row[CalendarFeatures::kCount];
        cf.write_to(row);
        const auto& b = config.beta;
        const double trend_season = b[0] + b[1] * row[0] + b[2] * row[1] +
                                    b[3] * row[2] + b[4] * row[3] + b[5] * row[4] +
                                    b[6] * row[5] + b[7] * row[6] + b[8] * row[7];

        const double c = (dry - config.dry_mean) / config.dry_amp;
        const double mu = config.a_dry * c + config.a_dry2 * c * c;
        const double sigma = config.sigma0 + config.sigma1 * c * c;
        const double resid =
            config.zero_noise ? 0.0 : mu + sigma * gauss(resid_rng);

        DailyRecord rec;
        rec.date = d;
        rec.consumption_gwh = std::exp(trend_season + resid);
        rec.dry_bulb_f = dry;
        rec.wet_bulb_f = wet;
        rec.is_saturday = d.is_saturday();
        rec.is_sunday = d.is_sunday();
        rec.is_holiday = holidays.contains(d);
        data.days.push_back(rec);

        ts.push_back(trend_season);
        rmu.push_back(mu);
        rsd.push_back(sigma);
        t += 1.0;
    }

    const auto n = static_cast<Eigen::Index>(ts.size());
    data.truth.trend_seasonality = Eigen::Map<Vector>(ts.data(), n);
    data.truth.residual_mean = Eigen::Map<Vector>(rmu.data(), n);
    data.truth.residual_sd = Eigen::Map<Vector>(rsd.data(), n);
    return data;
}

std::vector<HourlyRecord> expand_hourly(const std::vector<DailyRecord>& days) {
    std::vector<HourlyRecord> out;
    out.reserve(days.size() * 24);
    for (const auto& d : days) {
        for (int h = 0; h < 24; ++h) {
            HourlyRecord r;
            r.date = d.date;
            r.hour = h;
            r.demand_mwh = d.consumption_gwh * 1000.0 / 24.0;
            r.dry_bulb_f = d.dry_bulb_f;
            r.wet_bulb_f = d.wet_bulb_f;
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace nax
