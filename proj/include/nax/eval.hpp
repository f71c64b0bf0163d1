#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nax/forecast.hpp"
#include "nax/types.hpp"

namespace nax {

/// Per-day consumption-space quantile accessor, p in (0,1).
using QuantileFn = std::function<double(int day, double p)>;

QuantileFn quantiles_of(const DensityForecast& fc);
QuantileFn quantiles_of(const MixtureForecast& fc);

double rmse(const Vector& forecast, const Vector& realized);
double mape(const Vector& forecast, const Vector& realized);  // percent

struct PinballResult {
    Vector per_percentile;  // 99 values, percentiles 1..99
    double apl = 0;         // mean of the 99
    std::vector<int> non_monotone_days;  // reported, never repaired
};

PinballResult pinball(const QuantileFn& quantiles, const Vector& realized);

struct ViolationSeries {
    std::vector<int> outside;  // 0/1 per day
    double alpha = 0;          // CI level

    int violations() const;
    int size() const { return static_cast<int>(outside.size()); }
};

struct CoveragePoint {
    double alpha = 0;
    double empirical = 0;
};

struct BacktestResult {
    std::vector<CoveragePoint> curve;
    std::vector<ViolationSeries> violations;  // one per alpha
};

/// Central CI at each alpha: inside iff y in [q((1-a)/2), q(1-(1-a)/2)].
BacktestResult backtest_ci(const QuantileFn& quantiles, const Vector& realized,
                           const std::vector<double>& alphas);

struct CoverageTest {
    double statistic = 0;
    double threshold = 0;
    bool reject = false;
};

/// Kupiec unconditional coverage LR against chi2(1) at 95% (threshold 3.84).
CoverageTest uc_test(const ViolationSeries& v, double nominal_rate);

/// Christoffersen conditional coverage LR (UC + independence) against
/// chi2(2) at 95% (threshold 5.99).
CoverageTest cc_test(const ViolationSeries& v, double nominal_rate);

struct EvalReport {
    double rmse_gwh = 0;
    double mape_pct = 0;
    PinballResult pinball;
    std::vector<CoveragePoint> coverage_curve;
    CoverageTest uc;  // at the 95% CI
    CoverageTest cc;
    ViolationSeries violations_95;

    std::string to_json() const;
};

EvalReport evaluate(const QuantileFn& quantiles, const Vector& point_gwh,
                    const Vector& realized_gwh);

void write_pinball_csv(const std::string& path, const PinballResult& r);
void write_coverage_csv(const std::string& path,
                        const std::vector<CoveragePoint>& curve);

}  // namespace nax
