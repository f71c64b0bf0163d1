#include "nax/model.hpp"

#include <fstream>

#include <json.hpp>

namespace nax {

ForecastDay to_forecast_day(const DailyRecord& d) {
    return ForecastDay{d.date, d.dry_bulb_f, d.wet_bulb_f};
}

std::vector<ForecastDay> to_forecast_days(const std::vector<DailyRecord>& days) {
    std::vector<ForecastDay> out;
    out.reserve(days.size());
    for (const auto& d : days) out.push_back(to_forecast_day(d));
    return out;
}

Matrix build_input_matrix(const std::vector<ForecastDay>& days, double t0,
                          const HolidayCalendar& holidays) {
    Matrix X(static_cast<Eigen::Index>(days.size()), kExogenousInputs);
    double t = t0;
    for (std::size_t i = 0; i < days.size(); ++i) {
        auto r = static_cast<Eigen::Index>(i);
        CalendarFeatures cf = calendar_features(days[i].date, t, holidays);
        X(r, 0) = days[i].dry_bulb_f;
        X(r, 1) = days[i].wet_bulb_f;
        X(r, 2) = cf.t;
        X(r, 3) = cf.sin_w;
        X(r, 4) = cf.cos_w;
        X(r, 5) = cf.sin_2w;
        X(r, 6) = cf.cos_2w;
        X(r, 7) = cf.d_sat;
        X(r, 8) = cf.d_sun;
        X(r, 9) = cf.d_hol;
        t += 1.0;
    }
    return X;
}

namespace {

const std::vector<std::string> kScalerColumns = {
    "dry_bulb", "wet_bulb", "t",     "sin_w", "cos_w", "sin_2w",
    "cos_2w",   "d_sat",    "d_sun", "d_hol", "residual"};

/// Scale the exogenous input block with the training-window scaler.
Matrix scale_inputs(const MinMaxScaler& scaler, const Matrix& raw) {
    Matrix scaled(raw.rows(), raw.cols());
    for (int c = 0; c < kExogenousInputs; ++c)
        scaled.col(c) = (raw.col(c).array() - scaler.col_min(c)) /
                        (scaler.col_max(c) - scaler.col_min(c));
    return scaled;
}

}  // namespace

TrainedModel calibrate(const NaxConfig& config,
                       const std::vector<DailyRecord>& training_days,
                       double t0, const HolidayCalendar& holidays,
                       const std::vector<DailyRecord>* validation_days) {
    if (training_days.empty())
        throw std::invalid_argument("calibrate: empty training window");

    TrainedModel model;
    model.config = config;
    model.train_first = training_days.front().date;
    model.train_last = training_days.back().date;
    model.t_origin = t0;

    // Regression layer on un-normalized log consumption.
    LogSeries log_series = log_transform(training_days);
    auto cal = calendar_features(training_days, t0, holidays);
    Matrix design = build_design_matrix(cal);
    GlmFit glm_fit = fit_ols(design, log_series.values);

    // One winsorization pass, then refit when anything moved.
    OutlierReport outliers = treat_outliers(log_series, glm_fit.residuals);
    if (!outliers.winsorized_dates.empty())
        glm_fit = fit_ols(design, log_series.values);
    model.glm = glm_fit.coefficients;

    // Scaler over inputs plus the residual target, training rows only.
    Matrix raw_inputs =
        build_input_matrix(to_forecast_days(training_days), t0, holidays);
    Matrix with_target(raw_inputs.rows(), kExogenousInputs + 1);
    with_target.leftCols(kExogenousInputs) = raw_inputs;
    with_target.col(kTargetColumn) = glm_fit.residuals;
    model.scaler = MinMaxScaler::fit(with_target, kScalerColumns);

    Matrix inputs = scale_inputs(model.scaler, raw_inputs);
    Vector targets =
        model.scaler.transform_column(glm_fit.residuals, kTargetColumn);

    TrainResult trained;
    if (validation_days && !validation_days->empty()) {
        const double vt0 = t0 + static_cast<double>(training_days.size());
        Matrix vraw =
            build_input_matrix(to_forecast_days(*validation_days), vt0, holidays);
        Matrix vinputs = scale_inputs(model.scaler, vraw);
        LogSeries vlog = log_transform(*validation_days);
        auto vcal = calendar_features(*validation_days, vt0, holidays);
        Vector vresid = vlog.values - glm_predict(model.glm, vcal);
        Vector vtargets = model.scaler.transform_column(vresid, kTargetColumn);
        trained = train(config, inputs, targets, &vinputs, &vtargets);
    } else {
        trained = train(config, inputs, targets);
    }

    model.params = trained.params;
    model.boundary_feedback = trained.final_feedback;
    return model;
}

std::string TrainedModel::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = {{"hidden_neurons", config.hidden_neurons},
                   {"activation", nax::to_string(config.activation)},
                   {"learning_rate", config.learning_rate},
                   {"batch_size", config.batch_size},
                   {"l2", config.l2},
                   {"train_window_years", config.train_window_years},
                   {"epochs", config.epochs},
                   {"patience", config.patience},
                   {"seed", config.seed}};
    j["glm"] = {{"beta", std::vector<double>(glm.beta.begin(), glm.beta.end())},
                {"std_errors", std::vector<double>(glm.std_errors.begin(),
                                                   glm.std_errors.end())}};
    // ordered_json keeps the scaler's column order; plain json would sort
    // the keys and scramble the columns on reload.
    j["params"] = nlohmann::ordered_json::parse(params.to_json());
    j["scaler"] = nlohmann::ordered_json::parse(scaler.to_json());
    j["boundary_feedback"] = {boundary_feedback[0], boundary_feedback[1]};
    j["train_first"] = train_first.to_string();
    j["train_last"] = train_last.to_string();
    j["t_origin"] = t_origin;
    return j.dump(2);
}

TrainedModel TrainedModel::from_json(const std::string& json) {
    auto j = nlohmann::ordered_json::parse(json);
    TrainedModel m;
    const auto& c = j.at("config");
    m.config.hidden_neurons = c.at("hidden_neurons").get<int>();
    m.config.activation = activation_from_string(c.at("activation").get<std::string>());
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.l2 = c.at("l2").get<double>();
    m.config.train_window_years = c.at("train_window_years").get<int>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.patience = c.at("patience").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();

    auto beta = j.at("glm").at("beta").get<std::vector<double>>();
    auto se = j.at("glm").at("std_errors").get<std::vector<double>>();
    m.glm.beta = Eigen::Map<Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    m.glm.std_errors = Eigen::Map<Vector>(se.data(), static_cast<Eigen::Index>(se.size()));

    m.params = NaxParams::from_json(j.at("params").dump());
    m.scaler = MinMaxScaler::from_json(j.at("scaler").dump());
    m.boundary_feedback[0] = j.at("boundary_feedback")[0].get<double>();
    m.boundary_feedback[1] = j.at("boundary_feedback")[1].get<double>();
    m.train_first = Date::parse(j.at("train_first").get<std::string>());
    m.train_last = Date::parse(j.at("train_last").get<std::string>());
    m.t_origin = j.at("t_origin").get<double>();
    return m;
}

void TrainedModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json() << '\n';
}

TrainedModel TrainedModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string s((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
    return from_json(s);
}

}  // namespace nax
