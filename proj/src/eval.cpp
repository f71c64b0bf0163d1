#include "nax/eval.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace nax {

QuantileFn quantiles_of(const DensityForecast& fc) {
    return [fc](int day, double p) { return fc.days[day].quantile_gwh(p); };
}

QuantileFn quantiles_of(const MixtureForecast& fc) {
    return [fc](int day, double p) { return std::exp(fc.days[day].quantile(p)); };
}

double rmse(const Vector& forecast, const Vector& realized) {
    if (forecast.size() != realized.size() || forecast.size() == 0)
        throw std::invalid_argument("rmse: empty or mismatched series");
    return std::sqrt((forecast - realized).squaredNorm() /
                     static_cast<double>(forecast.size()));
}

double mape(const Vector& forecast, const Vector& realized) {
    if (forecast.size() != realized.size() || forecast.size() == 0)
        throw std::invalid_argument("mape: empty or mismatched series");
    double sum = 0;
    for (Eigen::Index i = 0; i < realized.size(); ++i) {
        if (!(realized[i] > 0))
            throw std::domain_error("mape: nonpositive realized value");
        sum += std::abs(realized[i] - forecast[i]) / realized[i];
    }
    return 100.0 * sum / static_cast<double>(realized.size());
}

PinballResult pinball(const QuantileFn& quantiles, const Vector& realized) {
    const int n = static_cast<int>(realized.size());
    PinballResult out;
    out.per_percentile = Vector::Zero(99);

    for (int day = 0; day < n; ++day) {
        const double y = realized[day];
        double prev_q = -std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (int pi = 1; pi <= 99; ++pi) {
            const double p = pi / 100.0;
            const double q = quantiles(day, p);
            if (q < prev_q) monotone = false;
            prev_q = q;
            const double loss = y >= q ? p * (y - q) : (1.0 - p) * (q - y);
            out.per_percentile[pi - 1] += loss;
        }
        if (!monotone) out.non_monotone_days.push_back(day);
    }
    out.per_percentile /= static_cast<double>(n);
    out.apl = out.per_percentile.mean();
    return out;
}

int ViolationSeries::violations() const {
    int s = 0;
    for (int v : outside) s += v;
    return s;
}

BacktestResult backtest_ci(const QuantileFn& quantiles, const Vector& realized,
                           const std::vector<double>& alphas) {
    const int n = static_cast<int>(realized.size());
    BacktestResult out;
    for (double alpha : alphas) {
        ViolationSeries v;
        v.alpha = alpha;
        v.outside.resize(n);
        const double plo = (1.0 - alpha) / 2.0;
        const double phi = 1.0 - plo;
        int inside = 0;
        for (int day = 0; day < n; ++day) {
            const bool in =
                realized[day] >= quantiles(day, plo) &&
                realized[day] <= quantiles(day, phi);
            v.outside[day] = in ? 0 : 1;
            inside += in ? 1 : 0;
        }
        out.curve.push_back({alpha, inside / static_cast<double>(n)});
        out.violations.push_back(std::move(v));
    }
    return out;
}

namespace {
// 0 * ln 0 = 0 convention throughout the LR statistics.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }
}  // namespace

CoverageTest uc_test(const ViolationSeries& v, double nominal_rate) {
    const int n = v.size();
    if (n < 1) throw std::invalid_argument("uc_test: empty series");
    const int n1 = v.violations();
    const int n0 = n - n1;
    const double pi_hat = static_cast<double>(n1) / n;

    const double log_null = xlogy(n1, nominal_rate) + xlogy(n0, 1.0 - nominal_rate);
    const double log_alt = xlogy(n1, pi_hat) + xlogy(n0, 1.0 - pi_hat);

    CoverageTest t;
    t.statistic = -2.0 * (log_null - log_alt);
    t.threshold = 3.84;
    t.reject = t.statistic > t.threshold;
    return t;
}

CoverageTest cc_test(const ViolationSeries& v, double nominal_rate) {
    const int n = v.size();
    if (n < 2) throw std::invalid_argument("cc_test: need at least 2 observations");

    // Transition counts of the 0/1 chain.
    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (int i = 1; i < n; ++i) {
        const int a = v.outside[i - 1], b = v.outside[i];
        if (a == 0 && b == 0) ++n00;
        else if (a == 0 && b == 1) ++n01;
        else if (a == 1 && b == 0) ++n10;
        else ++n11;
    }
    const double pi01 = (n00 + n01) > 0 ? n01 / (n00 + n01) : 0.0;
    const double pi11 = (n10 + n11) > 0 ? n11 / (n10 + n11) : 0.0;
    const double pi = (n01 + n11) / (n00 + n01 + n10 + n11);

    const double log_indep = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    const double log_markov = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) +
                              xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
    const double lr_ind = -2.0 * (log_indep - log_markov);

    CoverageTest t;
    t.statistic = uc_test(v, nominal_rate).statistic + lr_ind;
    t.threshold = 5.99;
    t.reject = t.statistic > t.threshold;
    return t;
}

EvalReport evaluate(const QuantileFn& quantiles, const Vector& point_gwh,
                    const Vector& realized_gwh) {
    EvalReport r;
    r.rmse_gwh = rmse(point_gwh, realized_gwh);
    r.mape_pct = mape(point_gwh, realized_gwh);
    r.pinball = pinball(quantiles, realized_gwh);

    std::vector<double> alphas;
    for (int a = 5; a <= 95; a += 5) alphas.push_back(a / 100.0);
    alphas.push_back(0.98);
    BacktestResult bt = backtest_ci(quantiles, realized_gwh, alphas);
    r.coverage_curve = bt.curve;

    // Tests at the 95% CI (nominal violation rate 5%).
    for (std::size_t i = 0; i < bt.violations.size(); ++i) {
        if (bt.violations[i].alpha == 0.95) {
            r.violations_95 = bt.violations[i];
            r.uc = uc_test(r.violations_95, 0.05);
            r.cc = cc_test(r.violations_95, 0.05);
        }
    }
    return r;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["rmse_gwh"] = rmse_gwh;
    j["mape_pct"] = mape_pct;
    j["apl_gwh"] = pinball.apl;
    j["pinball"] = std::vector<double>(pinball.per_percentile.begin(),
                                       pinball.per_percentile.end());
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& c : coverage_curve)
        curve.push_back({{"alpha", c.alpha}, {"empirical", c.empirical}});
    j["coverage_curve"] = curve;
    j["uc"] = {{"statistic", uc.statistic},
               {"threshold", uc.threshold},
               {"reject", uc.reject}};
    j["cc"] = {{"statistic", cc.statistic},
               {"threshold", cc.threshold},
               {"reject", cc.reject}};
    j["violations_95"] = violations_95.outside;
    return j.dump(2);
}

void write_pinball_csv(const std::string& path, const PinballResult& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "percentile,loss\n";
    out.precision(12);
    for (int i = 0; i < 99; ++i) out << (i + 1) << ',' << r.per_percentile[i] << '\n';
}

void write_coverage_csv(const std::string& path,
                        const std::vector<CoveragePoint>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "alpha,empirical\n";
    out.precision(12);
    for (const auto& c : curve) out << c.alpha << ',' << c.empirical << '\n';
}

}  // namespace nax
