#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nax/model.hpp"

namespace nax {

/// Per-day Gaussian forecast in log space; consumption-space quantiles
/// follow from the lognormal transform.
struct DensityDay {
    Date date;
    double mean_log = 0;   // m_t = T_t + S_t + mu_t
    double sigma_log = 0;  // > 0

    double point_gwh() const;                // exp(m_t), lognormal median
    double quantile_gwh(double p) const;     // exp(m_t + sigma_t * z_p)
    double quantile_log(double p) const;
};

struct DensityForecast {
    std::vector<DensityDay> days;

    std::size_t size() const { return days.size(); }
};

/// Standard normal CDF and quantile (Wichura AS241).
double normal_cdf(double z);
double normal_quantile(double p);

/// Run the recurrence across the horizon with realized weather, seeded
/// with the model's end-of-training feedback state.
DensityForecast forecast_expost(const TrainedModel& model,
                                const std::vector<ForecastDay>& horizon,
                                const HolidayCalendar& holidays);

// ---------------------------------------------------------------------------
// Ex-ante machinery: block-bootstrapped temperatures and mixture densities.

struct BootstrapConfig {
    int mean_block_days = 7;   // m
    int half_range_days = 3;   // Delta; block length uniform on [m-D, m+D]
    int path_count = 2000;
    std::vector<int> source_years;
    std::uint64_t seed = 0;
};

struct BlockProvenance {
    int source_year = 0;
    int source_start_doy = 0;  // 1..365, after shift, start of the block
    int length = 0;
    int shift = 0;
};

struct TemperaturePath {
    std::vector<double> dry_bulb_f;  // one value per horizon day
    std::vector<double> wet_bulb_f;
    std::vector<BlockProvenance> provenance;
};

/// History lookup keyed by (year, day-of-year in the 365-day calendar).
class TemperatureHistory {
public:
    explicit TemperatureHistory(const std::vector<DailyRecord>& days);

    bool has(int year, int doy) const;
    std::pair<double, double> at(int year, int doy) const;  // (dry, wet)

private:
    std::map<std::pair<int, int>, std::pair<double, double>> table_;
};

std::vector<TemperaturePath> bootstrap_temperatures(
    const TemperatureHistory& history, const std::vector<Date>& horizon,
    const BootstrapConfig& config);

/// Equal-weight Gaussian mixture per day, one component per path.
struct MixtureDay {
    Date date;
    std::vector<double> mean_log;   // component means, T+S+mu per path
    std::vector<double> sigma_log;  // component sigmas

    double cdf(double x) const;
    double quantile(double p) const;  // bisection; closed form for 1 component
};

struct MixtureForecast {
    std::vector<MixtureDay> days;

    /// Summary with per-day mixture median as the point forecast. The
    /// returned sigma_log is the mixture standard deviation in log space.
    DensityForecast summary() const;
};

MixtureForecast forecast_exante(const TrainedModel& model,
                                const std::vector<Date>& horizon,
                                const std::vector<TemperaturePath>& paths,
                                const HolidayCalendar& holidays);

/// Forecast CSV: date,point_gwh,sigma_log,q01,q05,q25,q50,q75,q95,q99.
void write_forecast_csv(const std::string& path, const DensityForecast& fc);
void write_mixture_forecast_csv(const std::string& path,
                                const MixtureForecast& fc);
/// Per-path file: date,path_id,mu_log,sigma_log.
void write_mixture_paths_csv(const std::string& path,
                             const MixtureForecast& fc);

}  // namespace nax
