#include "nax/forecast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include "nax/rng.hpp"

namespace nax {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Wichura's AS241 (PPND16), |error| ~ 1e-16 over (0,1).
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0 ? -val : val;
}

double DensityDay::point_gwh() const { return std::exp(mean_log); }
double DensityDay::quantile_log(double p) const {
    return mean_log + sigma_log * normal_quantile(p);
}
double DensityDay::quantile_gwh(double p) const {
    return std::exp(quantile_log(p));
}

namespace {

/// Normalized-space (mu, sigma) per day from the recurrence, de-normalized
/// and combined with the regression layer.
DensityForecast assemble_forecast(const TrainedModel& model,
                                  const std::vector<ForecastDay>& horizon,
                                  const ForwardPass& fp, double t0,
                                  const HolidayCalendar& holidays) {
    DensityForecast fc;
    fc.days.reserve(horizon.size());
    for (std::size_t i = 0; i < horizon.size(); ++i) {
        auto t = static_cast<Eigen::Index>(i);
        CalendarFeatures cf =
            calendar_features(horizon[i].date, t0 + static_cast<double>(i), holidays);
        std::vector<CalendarFeatures> one{cf};
        const double trend_season = glm_predict(model.glm, one)[0];
        const double mu =
            model.scaler.unscale_value(fp.mu[t], kTargetColumn);
        const double sigma =
            model.scaler.unscale_spread(fp.sigma[t], kTargetColumn);
        if (!(sigma > 0))
            throw std::runtime_error("forecast: nonpositive sigma on " +
                                     horizon[i].date.to_string());
        fc.days.push_back(DensityDay{horizon[i].date, trend_season + mu, sigma});
    }
    return fc;
}

Matrix scaled_inputs(const TrainedModel& model,
                     const std::vector<ForecastDay>& horizon, double t0,
                     const HolidayCalendar& holidays) {
    Matrix raw = build_input_matrix(horizon, t0, holidays);
    Matrix scaled(raw.rows(), raw.cols());
    for (int c = 0; c < kExogenousInputs; ++c)
        scaled.col(c) = (raw.col(c).array() - model.scaler.col_min(c)) /
                        (model.scaler.col_max(c) - model.scaler.col_min(c));
    return scaled;
}

}  // namespace

DensityForecast forecast_expost(const TrainedModel& model,
                                const std::vector<ForecastDay>& horizon,
                                const HolidayCalendar& holidays) {
    if (horizon.empty()) throw std::invalid_argument("forecast_expost: empty horizon");
    const double t0 =
        model.t_origin +
        retained_days_between(model.train_first, horizon.front().date);
    Matrix inputs = scaled_inputs(model, horizon, t0, holidays);
    ForwardPass fp = forward(model.params, model.config.activation, inputs,
                             model.boundary_feedback);
    return assemble_forecast(model, horizon, fp, t0, holidays);
}

// ---------------------------------------------------------------------------

TemperatureHistory::TemperatureHistory(const std::vector<DailyRecord>& days) {
    for (const auto& d : days)
        table_[{d.date.year(), d.date.day_of_year_365()}] = {d.dry_bulb_f,
                                                             d.wet_bulb_f};
}

bool TemperatureHistory::has(int year, int doy) const {
    return table_.count({year, doy}) > 0;
}

std::pair<double, double> TemperatureHistory::at(int year, int doy) const {
    auto it = table_.find({year, doy});
    if (it == table_.end())
        throw std::out_of_range("temperature history gap at year " +
                                std::to_string(year) + " day " + std::to_string(doy));
    return it->second;
}

std::vector<TemperaturePath> bootstrap_temperatures(
    const TemperatureHistory& history, const std::vector<Date>& horizon,
    const BootstrapConfig& config) {
    if (config.path_count < 1)
        throw std::invalid_argument("bootstrap: path count must be >= 1");
    if (!(config.mean_block_days > config.half_range_days) ||
        config.half_range_days < 0)
        throw std::invalid_argument("bootstrap: need m > Delta >= 0");
    if (config.source_years.empty())
        throw std::invalid_argument("bootstrap: no source years");

    const int n = static_cast<int>(horizon.size());
    std::vector<TemperaturePath> paths(config.path_count);

    for (int pi = 0; pi < config.path_count; ++pi) {
        // Per-path stream: results independent of generation order.
        auto rng = make_rng(config.seed, "bootstrap-path",
                            static_cast<std::uint64_t>(pi));
        std::uniform_int_distribution<int> len_dist(
            config.mean_block_days - config.half_range_days,
            config.mean_block_days + config.half_range_days);
        std::uniform_int_distribution<int> shift_dist(-config.half_range_days,
                                                      config.half_range_days);
        std::uniform_int_distribution<std::size_t> year_dist(
            0, config.source_years.size() - 1);

        TemperaturePath& path = paths[pi];
        path.dry_bulb_f.resize(n);
        path.wet_bulb_f.resize(n);

        int pos = 0;
        while (pos < n) {
            const int length = std::min(len_dist(rng), n - pos);
            const int year = config.source_years[year_dist(rng)];
            const int shift = shift_dist(rng);

            // Day-of-year of block start in the 365-day calendar, shifted,
            // wrapped modulo 365 within the source year.
            const int base_doy = horizon[pos].day_of_year_365();
            const int start_doy = ((base_doy - 1 + shift) % 365 + 365) % 365 + 1;

            bool complete = true;
            for (int j = 0; j < length; ++j) {
                const int doy = (start_doy - 1 + j) % 365 + 1;
                if (!history.has(year, doy)) {
                    complete = false;
                    break;
                }
            }
            if (!complete) continue;  // resample this block

            for (int j = 0; j < length; ++j) {
                const int doy = (start_doy - 1 + j) % 365 + 1;
                auto [dry, wet] = history.at(year, doy);
                path.dry_bulb_f[pos + j] = dry;
                path.wet_bulb_f[pos + j] = wet;
            }
            path.provenance.push_back(BlockProvenance{year, start_doy, length, shift});
            pos += length;
        }
    }
    return paths;
}

// ---------------------------------------------------------------------------

double MixtureDay::cdf(double x) const {
    double sum = 0;
    for (std::size_t i = 0; i < mean_log.size(); ++i)
        sum += normal_cdf((x - mean_log[i]) / sigma_log[i]);
    return sum / static_cast<double>(mean_log.size());
}

double MixtureDay::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("mixture quantile: p must lie in (0,1)");
    const double z = normal_quantile(p);
    if (mean_log.size() == 1) return mean_log[0] + sigma_log[0] * z;

    // Bracket from the component extremes, then bisect.
    double lo = mean_log[0] + sigma_log[0] * z;
    double hi = lo;
    for (std::size_t i = 0; i < mean_log.size(); ++i) {
        lo = std::min(lo, mean_log[i] - 10.0 * sigma_log[i]);
        hi = std::max(hi, mean_log[i] + 10.0 * sigma_log[i]);
    }
    while (cdf(lo) > p) lo -= (hi - lo);
    while (cdf(hi) < p) hi += (hi - lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double c = cdf(mid);
        if (std::abs(c - p) < 1e-10 && (hi - lo) < 1e-10) return mid;
        (c < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DensityForecast MixtureForecast::summary() const {
    DensityForecast fc;
    fc.days.reserve(days.size());
    for (const auto& d : days) {
        const auto k = static_cast<double>(d.mean_log.size());
        double mean = 0, m2 = 0, v = 0;
        for (std::size_t i = 0; i < d.mean_log.size(); ++i) {
            mean += d.mean_log[i];
            m2 += d.mean_log[i] * d.mean_log[i];
            v += d.sigma_log[i] * d.sigma_log[i];
        }
        mean /= k;
        // Law of total variance: within-path plus across-path spread.
        const double var = v / k + (m2 / k - mean * mean);
        DensityDay day;
        day.date = d.date;
        day.mean_log = d.quantile(0.5);
        day.sigma_log = d.mean_log.size() == 1 ? d.sigma_log[0] : std::sqrt(var);
        fc.days.push_back(day);
    }
    return fc;
}

MixtureForecast forecast_exante(const TrainedModel& model,
                                const std::vector<Date>& horizon,
                                const std::vector<TemperaturePath>& paths,
                                const HolidayCalendar& holidays) {
    if (paths.empty()) throw std::invalid_argument("forecast_exante: no paths");

    MixtureForecast mix;
    mix.days.resize(horizon.size());
    for (std::size_t i = 0; i < horizon.size(); ++i) {
        mix.days[i].date = horizon[i];
        mix.days[i].mean_log.reserve(paths.size());
        mix.days[i].sigma_log.reserve(paths.size());
    }

    for (const auto& path : paths) {
        std::vector<ForecastDay> days(horizon.size());
        for (std::size_t i = 0; i < horizon.size(); ++i)
            days[i] = ForecastDay{horizon[i], path.dry_bulb_f[i],
                                  path.wet_bulb_f[i]};
        DensityForecast fc = forecast_expost(model, days, holidays);
        for (std::size_t i = 0; i < horizon.size(); ++i) {
            mix.days[i].mean_log.push_back(fc.days[i].mean_log);
            mix.days[i].sigma_log.push_back(fc.days[i].sigma_log);
        }
    }
    return mix;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::array<double, 7> kCsvQuantiles = {0.01, 0.05, 0.25, 0.50,
                                                 0.75, 0.95, 0.99};
}

void write_forecast_csv(const std::string& path, const DensityForecast& fc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "date,point_gwh,sigma_log,q01,q05,q25,q50,q75,q95,q99\n";
    out.precision(12);
    for (const auto& d : fc.days) {
        out << d.date.to_string() << ',' << d.point_gwh() << ',' << d.sigma_log;
        for (double q : kCsvQuantiles) out << ',' << d.quantile_gwh(q);
        out << '\n';
    }
}

void write_mixture_forecast_csv(const std::string& path,
                                const MixtureForecast& fc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "date,point_gwh,sigma_log,q01,q05,q25,q50,q75,q95,q99\n";
    out.precision(12);
    DensityForecast s = fc.summary();
    for (std::size_t i = 0; i < fc.days.size(); ++i) {
        out << fc.days[i].date.to_string() << ','
            << std::exp(fc.days[i].quantile(0.5)) << ',' << s.days[i].sigma_log;
        for (double q : kCsvQuantiles)
            out << ',' << std::exp(fc.days[i].quantile(q));
        out << '\n';
    }
}

void write_mixture_paths_csv(const std::string& path, const MixtureForecast& fc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "date,path_id,mu_log,sigma_log\n";
    out.precision(12);
    for (const auto& d : fc.days)
        for (std::size_t p = 0; p < d.mean_log.size(); ++p)
            out << d.date.to_string() << ',' << p << ',' << d.mean_log[p] << ','
                << d.sigma_log[p] << '\n';
}

}  // namespace nax
