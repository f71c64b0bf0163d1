#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nax/eval.hpp"
#include "nax/model.hpp"

namespace nax {

/// Candidate hyper-parameter values for the validation grid search.
struct GridSpec {
    std::vector<int> neurons{3, 4, 5, 6, 8, 10};
    std::vector<Activation> activations{Activation::Softmax, Activation::Sigmoid};
    std::vector<double> learning_rates{0.1, 0.01, 0.001, 0.0007, 0.0005, 0.0001};
    std::vector<int> batch_sizes{50, 100, 350, 0};  // 0 = full series
    std::vector<double> l2_values{0.01, 0.001, 0.0001, 0.0};
    std::vector<int> train_windows_years{1, 2, 3, 4};
    int epochs = 500;
    int patience = 50;
    int replicates = 1;  // training seeds averaged per combination

    std::size_t cardinality() const;
    std::vector<NaxConfig> enumerate(std::uint64_t seed) const;
};

struct GridRow {
    NaxConfig config;
    double validation_rmse_gwh = 0;
    bool skipped = false;       // insufficient history for the window
    std::string skip_reason;
};

struct GridResult {
    std::vector<GridRow> leaderboard;  // enumeration order
    int selected_index = -1;

    const NaxConfig& selected() const { return leaderboard[selected_index].config; }
};

/// The full experiment inputs: daily records (leap days removed) and the
/// protocol windows.
struct Dataset {
    std::vector<DailyRecord> days;  // date-sorted
    Segmentation segmentation;
    HolidayCalendar holidays;
};

/// Grid search on the validation window. Each combination trains on the
/// trailing window ending at validation start and is scored by ex-post
/// RMSE in consumption space. Deterministic under the seed at any worker
/// count; ties break toward fewer neurons, larger L2, shorter window.
GridResult run_validation(const Dataset& data, const GridSpec& grid,
                          std::uint64_t seed, int workers = 1);

struct TestResult {
    TrainedModel model;
    DensityForecast forecast;
    EvalReport report;
};

/// Retrain on the window immediately preceding the test range and run the
/// ex-post forecast plus full evaluation over it.
TestResult run_test(const Dataset& data, const NaxConfig& config,
                    std::uint64_t seed);

struct RobustnessRow {
    int year = 0;
    double mape_pct = 0;
    double rmse_gwh = 0;
    double apl_gwh = 0;
};

std::vector<RobustnessRow> run_robustness(const Dataset& data,
                                          const NaxConfig& config,
                                          const std::vector<int>& years,
                                          std::uint64_t seed);

void write_leaderboard_csv(const std::string& path, const GridResult& result);
void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessRow>& rows,
                          const std::string& model_name = "nax");

}  // namespace nax
