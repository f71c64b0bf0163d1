// Command-line front end: wires config files and data into the pipeline
// and writes reproducible run artifacts (outputs plus a manifest).
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include "nax/eval.hpp"
#include "nax/forecast.hpp"
#include "nax/pipeline.hpp"
#include "nax/rng.hpp"

namespace fs = std::filesystem;
using namespace nax;

namespace {

// ---------------------------------------------------------------------------
// Flat key=value configuration with flag overrides.

struct RunConfig {
    std::map<std::string, std::string> values;
    std::string source_text;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end())
            throw std::runtime_error("missing config key '" + key + "'");
        return it->second;
    }
    std::string get_or(const std::string& key, const std::string& dflt) const {
        auto it = values.find(key);
        return it == values.end() ? dflt : it->second;
    }
    int get_int(const std::string& key, int dflt) const {
        return has(key) ? std::stoi(get(key)) : dflt;
    }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? std::stod(get(key)) : dflt;
    }
    Date get_date(const std::string& key) const { return Date::parse(get(key)); }

    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
        return out;
    }
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    RunConfig cfg;
    std::stringstream buf;
    buf << in.rdbuf();
    cfg.source_text = buf.str();

    std::stringstream lines(cfg.source_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value, got '" + t + "'");
        cfg.values[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
}

// FNV-1a over the config text; enough to fingerprint a run's inputs.
std::string content_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Run context: resolved config, output staging, manifest.

struct Context {
    RunConfig config;
    std::uint64_t seed = 0;
    int workers = 1;
    fs::path out_final;
    fs::path out_tmp;
    std::string command;
    std::string started_at;

    fs::path path(const std::string& name) const { return out_tmp / name; }

    void write_manifest() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["seed"] = seed;
        j["workers"] = workers;
        j["config_hash"] = content_hash(config.source_text);
        nlohmann::ordered_json resolved;
        for (const auto& [k, v] : config.values) resolved[k] = v;
        resolved["seed"] = std::to_string(seed);
        resolved["workers"] = std::to_string(workers);
        j["config"] = resolved;
        j["started_at"] = started_at;
        j["finished_at"] = iso_now();
        std::ofstream out(path("manifest.json"));
        out << j.dump(2) << '\n';
    }

    /// Promote the staged outputs over the final directory.
    void promote() const {
        if (fs::exists(out_final)) fs::remove_all(out_final);
        fs::create_directories(out_final.parent_path().empty()
                                   ? "."
                                   : out_final.parent_path());
        fs::rename(out_tmp, out_final);
    }
};

Context make_context(const std::string& command, const std::string& config_path,
                     std::optional<std::uint64_t> seed_flag,
                     const std::string& out_flag, int workers_flag) {
    Context ctx;
    ctx.command = command;
    ctx.started_at = iso_now();
    ctx.config = load_config(config_path);

    if (seed_flag)
        ctx.seed = *seed_flag;
    else if (ctx.config.has("seed"))
        ctx.seed = std::stoull(ctx.config.get("seed"));
    else
        throw std::runtime_error("seed is mandatory: set --seed or the 'seed' key");

    ctx.workers = workers_flag > 0 ? workers_flag
                                   : ctx.config.get_int("workers", 1);

    std::string out = !out_flag.empty() ? out_flag : ctx.config.get_or("out", "");
    if (out.empty())
        throw std::runtime_error("output directory is mandatory: set --out or 'out'");
    ctx.out_final = out;
    ctx.out_tmp = out + ".tmp-" + std::to_string(::getpid());
    fs::remove_all(ctx.out_tmp);
    fs::create_directories(ctx.out_tmp);
    return ctx;
}

// ---------------------------------------------------------------------------
// Data loading.

HolidayCalendar load_holidays(const RunConfig& cfg, int first_year,
                              int last_year) {
    if (cfg.has("data.holidays")) return HolidayCalendar::load(cfg.get("data.holidays"));
    return HolidayCalendar::us_fixed(first_year, last_year);
}

std::vector<DailyRecord> load_daily(const RunConfig& cfg,
                                    HolidayCalendar* holidays_out) {
    const std::string path = cfg.get("data.daily_csv");
    // Two passes: dates first to bound the holiday calendar, then the rows.
    HolidayCalendar probe;
    auto days = read_daily_csv(path, probe);
    if (days.empty()) throw std::runtime_error("no rows in " + path);
    HolidayCalendar holidays = load_holidays(cfg, days.front().date.year(),
                                             days.back().date.year());
    days = read_daily_csv(path, holidays);
    days = remove_leap_days(days);
    if (holidays_out) *holidays_out = holidays;
    return days;
}

Dataset load_dataset(const RunConfig& cfg) {
    Dataset d;
    d.days = load_daily(cfg, &d.holidays);
    d.segmentation.calibration = {cfg.get_date("segmentation.calibration_first"),
                                  cfg.get_date("segmentation.calibration_last")};
    d.segmentation.validation = {cfg.get_date("segmentation.validation_first"),
                                 cfg.get_date("segmentation.validation_last")};
    d.segmentation.test = {cfg.get_date("segmentation.test_first"),
                           cfg.get_date("segmentation.test_last")};
    d.segmentation.validate();
    return d;
}

NaxConfig model_config(const RunConfig& cfg) {
    NaxConfig c;
    c.hidden_neurons = cfg.get_int("model.hidden_neurons", c.hidden_neurons);
    if (cfg.has("model.activation"))
        c.activation = activation_from_string(cfg.get("model.activation"));
    c.learning_rate = cfg.get_double("model.learning_rate", c.learning_rate);
    c.batch_size = cfg.get_int("model.batch_size", c.batch_size);
    c.l2 = cfg.get_double("model.l2", c.l2);
    c.train_window_years =
        cfg.get_int("model.train_window_years", c.train_window_years);
    c.epochs = cfg.get_int("model.epochs", c.epochs);
    c.patience = cfg.get_int("model.patience", c.patience);
    return c;
}

GridSpec grid_spec(const RunConfig& cfg) {
    GridSpec g;
    auto ints = [&](const std::string& key, std::vector<int>& dst) {
        if (!cfg.has(key)) return;
        dst.clear();
        for (const auto& s : cfg.get_list(key)) dst.push_back(std::stoi(s));
    };
    auto doubles = [&](const std::string& key, std::vector<double>& dst) {
        if (!cfg.has(key)) return;
        dst.clear();
        for (const auto& s : cfg.get_list(key)) dst.push_back(std::stod(s));
    };
    ints("grid.neurons", g.neurons);
    if (cfg.has("grid.activations")) {
        g.activations.clear();
        for (const auto& s : cfg.get_list("grid.activations"))
            g.activations.push_back(activation_from_string(s));
    }
    doubles("grid.learning_rates", g.learning_rates);
    ints("grid.batch_sizes", g.batch_sizes);
    doubles("grid.l2_values", g.l2_values);
    ints("grid.train_windows_years", g.train_windows_years);
    g.epochs = cfg.get_int("grid.epochs", g.epochs);
    g.patience = cfg.get_int("grid.patience", g.patience);
    g.replicates = cfg.get_int("grid.replicates", g.replicates);
    return g;
}

/// Trailing `years`-year training window ending right before `first`.
std::vector<DailyRecord> window_before(const std::vector<DailyRecord>& days,
                                       const Date& first, int years,
                                       double* t0_out) {
    const int need = years * 365;
    int end = -1;
    for (std::size_t i = 0; i < days.size(); ++i)
        if (days[i].date < first) end = static_cast<int>(i);
    if (end + 1 < need)
        throw std::runtime_error("insufficient history: need " +
                                 std::to_string(need) + " days before " +
                                 first.to_string());
    *t0_out = static_cast<double>(end + 1 - need);
    return {days.begin() + (end + 1 - need), days.begin() + end + 1};
}

Vector realized_of(const std::vector<DailyRecord>& days) {
    Vector v(static_cast<Eigen::Index>(days.size()));
    for (std::size_t i = 0; i < days.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = days[i].consumption_gwh;
    return v;
}

Vector points_of(const DensityForecast& fc) {
    Vector v(static_cast<Eigen::Index>(fc.days.size()));
    for (std::size_t i = 0; i < fc.days.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = fc.days[i].point_gwh();
    return v;
}

void write_report(const Context& ctx, const EvalReport& report) {
    std::ofstream out(ctx.path("evaluation.json"));
    out << report.to_json() << '\n';
    write_pinball_csv(ctx.path("pinball.csv").string(), report.pinball);
    write_coverage_csv(ctx.path("coverage.csv").string(), report.coverage_curve);
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_ingest(const Context& ctx) {
    const RunConfig& cfg = ctx.config;
    std::vector<DailyRecord> days;
    std::vector<Date> incomplete;
    if (cfg.has("data.hourly_csv")) {
        auto hourly = read_hourly_csv(cfg.get("data.hourly_csv"));
        if (hourly.empty()) throw std::runtime_error("no hourly rows");
        HolidayCalendar holidays =
            load_holidays(cfg, hourly.front().date.year(), hourly.back().date.year());
        days = remove_leap_days(aggregate_daily(hourly, holidays, &incomplete));
    } else {
        days = load_daily(cfg, nullptr);
    }

    write_daily_csv(ctx.path("daily.csv").string(), days);

    // Descriptive stats per column: min/max/mean/median/std.
    auto stats = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const double n = static_cast<double>(v.size());
        double mean = 0;
        for (double x : v) mean += x;
        mean /= n;
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= (n - 1);
        const double median = v.size() % 2 == 1
                                  ? v[v.size() / 2]
                                  : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        return nlohmann::ordered_json{{"min", v.front()},  {"max", v.back()},
                                      {"mean", mean},      {"median", median},
                                      {"std", std::sqrt(var)}};
    };
    std::vector<double> cons, dry, wet;
    for (const auto& d : days) {
        cons.push_back(d.consumption_gwh);
        dry.push_back(d.dry_bulb_f);
        wet.push_back(d.wet_bulb_f);
    }
    nlohmann::ordered_json j;
    j["days"] = days.size();
    j["first"] = days.front().date.to_string();
    j["last"] = days.back().date.to_string();
    j["incomplete_days"] = incomplete.size();
    j["consumption_gwh"] = stats(cons);
    j["dry_bulb_f"] = stats(dry);
    j["wet_bulb_f"] = stats(wet);
    std::ofstream out(ctx.path("stats.json"));
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_validate(const Context& ctx) {
    Dataset data = load_dataset(ctx.config);
    GridSpec grid = grid_spec(ctx.config);
    GridResult result = run_validation(data, grid, ctx.seed, ctx.workers);
    write_leaderboard_csv(ctx.path("leaderboard.csv").string(), result);

    const NaxConfig& sel = result.selected();
    nlohmann::ordered_json j;
    j["hidden_neurons"] = sel.hidden_neurons;
    j["activation"] = to_string(sel.activation);
    j["learning_rate"] = sel.learning_rate;
    j["batch_size"] = sel.batch_size;
    j["l2"] = sel.l2;
    j["train_window_years"] = sel.train_window_years;
    j["validation_rmse_gwh"] =
        result.leaderboard[result.selected_index].validation_rmse_gwh;
    std::ofstream out(ctx.path("selected.json"));
    out << j.dump(2) << '\n';
    return 0;
}

int cmd_test(const Context& ctx) {
    Dataset data = load_dataset(ctx.config);
    TestResult result = run_test(data, model_config(ctx.config), ctx.seed);
    result.model.save(ctx.path("model.json").string());
    write_forecast_csv(ctx.path("forecast.csv").string(), result.forecast);
    write_report(ctx, result.report);
    return 0;
}

int cmd_robustness(const Context& ctx) {
    Dataset data = load_dataset(ctx.config);
    std::vector<int> years;
    for (const auto& s : ctx.config.get_list("robustness.years"))
        years.push_back(std::stoi(s));
    auto rows = run_robustness(data, model_config(ctx.config), years, ctx.seed);
    write_robustness_csv(ctx.path("robustness.csv").string(), rows);
    return 0;
}

TrainedModel obtain_model(const Context& ctx, const std::string& model_path,
                          const std::vector<DailyRecord>& days,
                          const HolidayCalendar& holidays, const Date& first) {
    if (!model_path.empty()) return TrainedModel::load(model_path);
    NaxConfig c = model_config(ctx.config);
    c.seed = substream_seed(ctx.seed, "forecast-training");
    double t0 = 0;
    auto training = window_before(days, first, c.train_window_years, &t0);
    return calibrate(c, training, t0, holidays);
}

/// Plot-ready density slice: CDF/PDF samples over a consumption grid.
void write_density_slice(const fs::path& path, const MixtureDay& day) {
    std::ofstream out(path);
    out << "consumption_gwh,cdf,pdf\n";
    out.precision(12);
    const double lo = day.quantile(0.001);
    const double hi = day.quantile(0.999);
    const int samples = 200;
    for (int i = 0; i <= samples; ++i) {
        const double log_x = lo + (hi - lo) * i / samples;
        const double x = std::exp(log_x);
        double pdf_log = 0;  // mixture density in log space
        for (std::size_t k = 0; k < day.mean_log.size(); ++k) {
            const double z = (log_x - day.mean_log[k]) / day.sigma_log[k];
            pdf_log += std::exp(-0.5 * z * z) /
                       (day.sigma_log[k] * std::sqrt(2.0 * M_PI));
        }
        pdf_log /= static_cast<double>(day.mean_log.size());
        // Change of variables to consumption space: f_X(x) = f_L(ln x) / x.
        out << x << ',' << day.cdf(log_x) << ',' << pdf_log / x << '\n';
    }
}

int cmd_forecast(const Context& ctx, bool ex_ante, int paths,
                 const std::string& model_path) {
    const RunConfig& cfg = ctx.config;
    HolidayCalendar holidays;
    auto days = load_daily(cfg, &holidays);
    const DateRange range{cfg.get_date("forecast.first"),
                          cfg.get_date("forecast.last")};
    auto horizon_days = slice(days, range);
    if (horizon_days.empty())
        throw std::runtime_error("no data rows in the forecast range " +
                                 range.first.to_string() + ".." +
                                 range.last.to_string());

    TrainedModel model = obtain_model(ctx, model_path, days, holidays, range.first);

    if (!ex_ante) {
        DensityForecast fc =
            forecast_expost(model, to_forecast_days(horizon_days), holidays);
        write_forecast_csv(ctx.path("forecast.csv").string(), fc);
        return 0;
    }

    // Ex-ante: bootstrap temperature paths from the pre-horizon years.
    BootstrapConfig bc;
    bc.mean_block_days = cfg.get_int("bootstrap.mean_block_days", bc.mean_block_days);
    bc.half_range_days = cfg.get_int("bootstrap.half_range_days", bc.half_range_days);
    bc.path_count = paths > 0 ? paths : cfg.get_int("bootstrap.paths", bc.path_count);
    bc.seed = ctx.seed;
    if (cfg.has("bootstrap.source_years")) {
        for (const auto& s : cfg.get_list("bootstrap.source_years"))
            bc.source_years.push_back(std::stoi(s));
    } else {
        // Years fully covered by the data before the horizon start.
        std::map<int, int> count;
        for (const auto& d : days)
            if (d.date < range.first) ++count[d.date.year()];
        for (const auto& [year, n] : count)
            if (n == 365) bc.source_years.push_back(year);
    }

    std::vector<Date> horizon;
    for (const auto& d : horizon_days) horizon.push_back(d.date);
    TemperatureHistory history(days);
    auto temp_paths = bootstrap_temperatures(history, horizon, bc);
    MixtureForecast mix = forecast_exante(model, horizon, temp_paths, holidays);

    write_mixture_forecast_csv(ctx.path("forecast.csv").string(), mix);
    write_mixture_paths_csv(ctx.path("paths.csv").string(), mix);

    // Quarterly density slices on the 15th, when inside the horizon.
    const std::pair<unsigned, const char*> slices[] = {
        {1, "jan15"}, {4, "apr15"}, {7, "jul15"}, {10, "oct15"}};
    for (const auto& [month, tag] : slices) {
        for (const auto& day : mix.days) {
            if (day.date.month() == month && day.date.day() == 15) {
                write_density_slice(
                    ctx.path(std::string("density_") + tag + ".csv"), day);
                break;
            }
        }
    }
    return 0;
}

int cmd_evaluate(const Context& ctx, const std::string& model_path) {
    const RunConfig& cfg = ctx.config;
    HolidayCalendar holidays;
    auto days = load_daily(cfg, &holidays);
    const DateRange range{cfg.get_date("forecast.first"),
                          cfg.get_date("forecast.last")};
    auto eval_days = slice(days, range);
    if (eval_days.empty())
        throw std::runtime_error("no data rows in the evaluation range " +
                                 range.first.to_string() + ".." +
                                 range.last.to_string());

    TrainedModel model = obtain_model(ctx, model_path, days, holidays, range.first);
    DensityForecast fc =
        forecast_expost(model, to_forecast_days(eval_days), holidays);
    EvalReport report =
        evaluate(quantiles_of(fc), points_of(fc), realized_of(eval_days));
    write_forecast_csv(ctx.path("forecast.csv").string(), fc);
    write_report(ctx, report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"daily power consumption density forecasting"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_flag, model_path;
    std::optional<std::uint64_t> seed_flag;
    int workers_flag = 0;
    app.add_option("--config", config_path, "key=value configuration file")
        ->required();
    app.add_option("--seed", seed_flag, "master RNG seed");
    app.add_option("--out", out_flag, "output directory");
    app.add_option("--workers", workers_flag, "parallel worker budget");

    auto* ingest = app.add_subcommand("ingest", "aggregate raw data to daily records");
    auto* validate = app.add_subcommand("validate", "hyper-parameter grid search");
    auto* test = app.add_subcommand("test", "train and evaluate on the test range");
    auto* robustness = app.add_subcommand("robustness", "per-year retrain and score");
    auto* forecast = app.add_subcommand("forecast", "density forecast over a range");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "forecast and score a range");

    bool ex_post = false, ex_ante = false;
    int paths = 0;
    forecast->add_flag("--ex-post", ex_post, "use realized weather");
    forecast->add_flag("--ex-ante", ex_ante, "use bootstrapped weather paths");
    forecast->add_option("--paths", paths, "bootstrap path count");
    forecast->add_option("--model", model_path, "trained model artifact");
    evaluate_cmd->add_option("--model", model_path, "trained model artifact");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (sub == forecast && ex_post == ex_ante)
            throw std::runtime_error("forecast: pass exactly one of --ex-post/--ex-ante");

        Context ctx = make_context(sub->get_name(), config_path, seed_flag,
                                   out_flag, workers_flag);
        int rc = 1;
        try {
            if (sub == ingest) rc = cmd_ingest(ctx);
            else if (sub == validate) rc = cmd_validate(ctx);
            else if (sub == test) rc = cmd_test(ctx);
            else if (sub == robustness) rc = cmd_robustness(ctx);
            else if (sub == forecast) rc = cmd_forecast(ctx, ex_ante, paths, model_path);
            else rc = cmd_evaluate(ctx, model_path);
        } catch (...) {
            fs::remove_all(ctx.out_tmp);
            throw;
        }
        if (rc == 0) {
            ctx.write_manifest();
            ctx.promote();
        } else {
            fs::remove_all(ctx.out_tmp);
        }
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
