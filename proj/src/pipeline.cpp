#include "nax/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "nax/rng.hpp"

namespace nax {

std::size_t GridSpec::cardinality() const {
    return neurons.size() * activations.size() * learning_rates.size() *
           batch_sizes.size() * l2_values.size() * train_windows_years.size();
}

std::vector<NaxConfig> GridSpec::enumerate(std::uint64_t seed) const {
    std::vector<NaxConfig> out;
    out.reserve(cardinality());
    std::size_t index = 0;
    for (int n : neurons)
        for (Activation a : activations)
            for (double lr : learning_rates)
                for (int b : batch_sizes)
                    for (double l2 : l2_values)
                        for (int w : train_windows_years) {
                            NaxConfig c;
                            c.hidden_neurons = n;
                            c.activation = a;
                            c.learning_rate = lr;
                            c.batch_size = b;
                            c.l2 = l2;
                            c.train_window_years = w;
                            c.epochs = epochs;
                            c.patience = patience;
                            c.seed = substream_seed(seed, "grid-combination", index);
                            ++index;
                            out.push_back(c);
                        }
    return out;
}

namespace {

/// Trailing training window of `years` 365-day years ending right before
/// `window_end_exclusive`. Empty when the data does not reach back far enough.
std::vector<DailyRecord> trailing_window(const std::vector<DailyRecord>& days,
                                         const Date& window_end_exclusive,
                                         int years, double* t0_out) {
    const int need = years * 365;
    std::vector<DailyRecord> out;
    int end_idx = -1;
    for (std::size_t i = 0; i < days.size(); ++i)
        if (days[i].date < window_end_exclusive) end_idx = static_cast<int>(i);
    if (end_idx + 1 < need) return {};
    const int start_idx = end_idx + 1 - need;
    out.assign(days.begin() + start_idx, days.begin() + end_idx + 1);
    if (t0_out) *t0_out = static_cast<double>(start_idx);
    return out;
}

Vector realized_consumption(const std::vector<DailyRecord>& days) {
    Vector v(static_cast<Eigen::Index>(days.size()));
    for (std::size_t i = 0; i < days.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = days[i].consumption_gwh;
    return v;
}

Vector point_forecast(const DensityForecast& fc) {
    Vector v(static_cast<Eigen::Index>(fc.days.size()));
    for (std::size_t i = 0; i < fc.days.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = fc.days[i].point_gwh();
    return v;
}

}  // namespace

GridResult run_validation(const Dataset& data, const GridSpec& grid,
                          std::uint64_t seed, int workers) {
    data.segmentation.validate();
    const auto configs = grid.enumerate(seed);
    const auto validation_days = slice(data.days, data.segmentation.validation);
    if (validation_days.empty())
        throw std::runtime_error("run_validation: no data in the validation range");
    const Vector realized = realized_consumption(validation_days);
    const auto horizon = to_forecast_days(validation_days);

    GridResult result;
    result.leaderboard.resize(configs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            GridRow& row = result.leaderboard[i];
            row.config = configs[i];
            double t0 = 0;
            auto training = trailing_window(data.days,
                                            data.segmentation.validation.first,
                                            configs[i].train_window_years, &t0);
            if (training.empty()) {
                row.skipped = true;
                row.skip_reason = "insufficient history for a " +
                                  std::to_string(configs[i].train_window_years) +
                                  "-year window";
                continue;
            }
            double rmse_sum = 0;
            const int reps = std::max(1, grid.replicates);
            for (int rep = 0; rep < reps; ++rep) {
                NaxConfig c = configs[i];
                if (rep > 0)
                    c.seed = substream_seed(c.seed, "grid-replicate",
                                            static_cast<std::uint64_t>(rep));
                TrainedModel model =
                    calibrate(c, training, t0, data.holidays, &validation_days);
                DensityForecast fc = forecast_expost(model, horizon, data.holidays);
                rmse_sum += rmse(point_forecast(fc), realized);
            }
            row.validation_rmse_gwh = rmse_sum / reps;
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Deterministic selection: RMSE, then fewer neurons, larger L2,
    // shorter window.
    int best = -1;
    for (std::size_t i = 0; i < result.leaderboard.size(); ++i) {
        const GridRow& r = result.leaderboard[i];
        if (r.skipped) continue;
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const GridRow& b = result.leaderboard[best];
        auto key = [](const GridRow& g) {
            return std::make_tuple(g.validation_rmse_gwh, g.config.hidden_neurons,
                                   -g.config.l2, g.config.train_window_years);
        };
        if (key(r) < key(b)) best = static_cast<int>(i);
    }
    if (best < 0) throw std::runtime_error("run_validation: every combination skipped");
    result.selected_index = best;
    return result;
}

TestResult run_test(const Dataset& data, const NaxConfig& config,
                    std::uint64_t seed) {
    data.segmentation.validate();
    const auto test_days = slice(data.days, data.segmentation.test);
    if (test_days.empty())
        throw std::runtime_error("run_test: no data in the test range");

    double t0 = 0;
    auto training = trailing_window(data.days, data.segmentation.test.first,
                                    config.train_window_years, &t0);
    if (training.empty())
        throw std::runtime_error("run_test: insufficient history before the test range");

    NaxConfig c = config;
    c.seed = substream_seed(seed, "test-training");

    TestResult result;
    result.model = calibrate(c, training, t0, data.holidays);
    result.forecast =
        forecast_expost(result.model, to_forecast_days(test_days), data.holidays);
    result.report = evaluate(quantiles_of(result.forecast),
                             point_forecast(result.forecast),
                             realized_consumption(test_days));
    return result;
}

std::vector<RobustnessRow> run_robustness(const Dataset& data,
                                          const NaxConfig& config,
                                          const std::vector<int>& years,
                                          std::uint64_t seed) {
    std::vector<RobustnessRow> rows;
    for (std::size_t yi = 0; yi < years.size(); ++yi) {
        const int year = years[yi];
        DateRange range{Date{year, 1, 1}, Date{year, 12, 31}};
        const auto year_days = slice(data.days, range);
        if (year_days.empty())
            throw std::runtime_error("run_robustness: no data for year " +
                                     std::to_string(year));

        double t0 = 0;
        auto training = trailing_window(data.days, range.first,
                                        config.train_window_years, &t0);
        if (training.empty())
            throw std::runtime_error("run_robustness: insufficient history before " +
                                     std::to_string(year));

        NaxConfig c = config;
        c.seed = substream_seed(seed, "robustness-training", yi);
        TrainedModel model = calibrate(c, training, t0, data.holidays);
        DensityForecast fc =
            forecast_expost(model, to_forecast_days(year_days), data.holidays);
        EvalReport report = evaluate(quantiles_of(fc), point_forecast(fc),
                                     realized_consumption(year_days));

        rows.push_back(RobustnessRow{year, report.mape_pct, report.rmse_gwh,
                                     report.pinball.apl});
    }
    return rows;
}

void write_leaderboard_csv(const std::string& path, const GridResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "neurons,activation,learning_rate,batch_size,l2,train_window_years,"
           "validation_rmse_gwh,selected,skipped\n";
    out.precision(12);
    for (std::size_t i = 0; i < result.leaderboard.size(); ++i) {
        const GridRow& r = result.leaderboard[i];
        out << r.config.hidden_neurons << ',' << to_string(r.config.activation)
            << ',' << r.config.learning_rate << ',' << r.config.batch_size << ','
            << r.config.l2 << ',' << r.config.train_window_years << ',';
        if (r.skipped)
            out << "nan";
        else
            out << r.validation_rmse_gwh;
        out << ',' << (static_cast<int>(i) == result.selected_index ? 1 : 0) << ','
            << (r.skipped ? 1 : 0) << '\n';
    }
}

void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessRow>& rows,
                          const std::string& model_name) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "year,model,mape_pct,rmse_gwh,apl_gwh\n";
    out.precision(12);
    for (const auto& r : rows)
        out << r.year << ',' << model_name << ',' << r.mape_pct << ','
            << r.rmse_gwh << ',' << r.apl_gwh << '\n';
}

}  // namespace nax
