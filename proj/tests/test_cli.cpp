#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <json.hpp>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nax/ingest.hpp"
#include "nax/synthetic.hpp"

namespace fs = std::filesystem;
using namespace nax;

namespace {

std::string cli_binary() {
    const char* p = std::getenv("NAX_CLI");
    REQUIRE_MESSAGE(p != nullptr, "NAX_CLI must point at the CLI binary");
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_binary() + " " + args + " > cli_stdout.log 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE_MESSAGE(in.good(), ("missing file " + p.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, sep)) out.push_back(f);
    return out;
}

/// One shared synthetic dataset plus a base config on disk.
struct CliFixture {
    fs::path dir = "cli_work";
    fs::path data_csv = dir / "daily.csv";
    fs::path config = dir / "run.conf";
    std::vector<DailyRecord> days;

    CliFixture() {
        fs::remove_all(dir);
        fs::create_directories(dir);
        HolidayCalendar holidays = HolidayCalendar::us_fixed(2007, 2013);
        SyntheticConfig cfg;
        cfg.first = Date{2008, 1, 1};
        cfg.last = Date{2012, 12, 31};
        cfg.seed = 31;
        days = generate_synthetic(cfg, holidays).days;
        write_daily_csv(data_csv.string(), days);

        std::ofstream out(config);
        out << "# synthetic end-to-end run\n"
            << "data.daily_csv = " << data_csv.string() << "\n"
            << "segmentation.calibration_first = 2008-01-01\n"
            << "segmentation.calibration_last = 2010-12-31\n"
            << "segmentation.validation_first = 2011-01-01\n"
            << "segmentation.validation_last = 2011-12-31\n"
            << "segmentation.test_first = 2012-01-01\n"
            << "segmentation.test_last = 2012-12-31\n"
            << "forecast.first = 2012-01-01\n"
            << "forecast.last = 2012-12-31\n"
            << "robustness.years = 2012\n"
            << "model.hidden_neurons = 2\n"
            << "model.activation = sigmoid\n"
            << "model.learning_rate = 0.01\n"
            << "model.batch_size = 100\n"
            << "model.epochs = 15\n"
            << "model.patience = 0\n"
            << "model.train_window_years = 2\n"
            << "grid.neurons = 2,3\n"
            << "grid.activations = sigmoid\n"
            << "grid.learning_rates = 0.01\n"
            << "grid.batch_sizes = 100\n"
            << "grid.l2_values = 0.0001\n"
            << "grid.train_windows_years = 2\n"
            << "grid.epochs = 10\n"
            << "grid.patience = 0\n"
            << "seed = 17\n";
    }

    std::string base(const std::string& out_dir) const {
        return "--config " + config.string() + " --out " + (dir / out_dir).string();
    }
};

}  // namespace

TEST_CASE("ingest writes daily data and recountable stats") {
    CliFixture fx;
    REQUIRE(run_cli("ingest " + fx.base("ingest_out")) == 0);

    const fs::path out = fx.dir / "ingest_out";
    CHECK(fs::exists(out / "manifest.json"));
    const std::string daily = slurp(out / "daily.csv");
    CHECK(daily.rfind("date,consumption_gwh", 0) == 0);

    // Independent recount of the consumption mean from the source rows.
    double mean = 0;
    for (const auto& d : fx.days) mean += d.consumption_gwh;
    mean /= static_cast<double>(fx.days.size());
    auto stats = nlohmann::json::parse(slurp(out / "stats.json"));
    CHECK(stats.at("consumption_gwh").at("mean").get<double>() ==
          doctest::Approx(mean).epsilon(1e-9));
    CHECK(stats.at("days").get<std::size_t>() == fx.days.size());
    CHECK(stats.at("consumption_gwh").at("min").get<double>() <=
          stats.at("consumption_gwh").at("median").get<double>());
}

TEST_CASE("validate writes one leaderboard row per grid combination") {
    CliFixture fx;
    REQUIRE(run_cli("validate " + fx.base("val_out")) == 0);

    const std::string board = slurp(fx.dir / "val_out" / "leaderboard.csv");
    std::stringstream ss(board);
    std::string line;
    int rows = -1;  // discount the header
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // grid.neurons = 2,3 with singletons elsewhere
    CHECK(fs::exists(fx.dir / "val_out" / "selected.json"));

    SUBCASE("rerun with the same seed is byte-identical") {
        REQUIRE(run_cli("validate " + fx.base("val_out2")) == 0);
        CHECK(slurp(fx.dir / "val_out2" / "leaderboard.csv") == board);
    }
    SUBCASE("a different seed moves the numbers") {
        REQUIRE(run_cli("validate --seed 18 " + fx.base("val_out3")) == 0);
        CHECK(slurp(fx.dir / "val_out3" / "leaderboard.csv") != board);
    }
    SUBCASE("manifest records the resolved seed and config hash") {
        const std::string manifest = slurp(fx.dir / "val_out" / "manifest.json");
        CHECK(manifest.find("\"seed\": 17") != std::string::npos);
        CHECK(manifest.find("config_hash") != std::string::npos);
        CHECK(manifest.find("grid.neurons") != std::string::npos);
    }
}

TEST_CASE("test writes a model, forecast, and evaluation artifacts") {
    CliFixture fx;
    REQUIRE(run_cli("test " + fx.base("test_out")) == 0);
    const fs::path out = fx.dir / "test_out";
    for (const char* f : {"model.json", "forecast.csv", "evaluation.json",
                          "pinball.csv", "coverage.csv", "manifest.json"})
        CHECK_MESSAGE(fs::exists(out / f), f);

    SUBCASE("forecast quantile columns self-parse as monotone") {
        std::stringstream ss(slurp(out / "forecast.csv"));
        std::string line;
        std::getline(ss, line);
        CHECK(line ==
              "date,point_gwh,sigma_log,q01,q05,q25,q50,q75,q95,q99");
        int rows = 0;
        while (std::getline(ss, line)) {
            auto f = split(line);
            REQUIRE(f.size() == 10);
            double prev = 0;
            for (int c = 3; c < 10; ++c) {
                const double q = std::stod(f[c]);
                CHECK(q > prev);
                prev = q;
            }
            ++rows;
        }
        CHECK(rows == 365);
    }

    SUBCASE("ex-post forecast from the saved model reproduces the test forecast") {
        const std::string model = (out / "model.json").string();
        REQUIRE(run_cli("forecast --ex-post --model " + model + " " +
                        fx.base("fc_out")) == 0);
        CHECK(slurp(fx.dir / "fc_out" / "forecast.csv") ==
              slurp(out / "forecast.csv"));
    }

    SUBCASE("evaluate from the saved model writes a scored report") {
        const std::string model = (out / "model.json").string();
        REQUIRE(run_cli("evaluate --model " + model + " " + fx.base("ev_out")) ==
                0);
        const std::string rep = slurp(fx.dir / "ev_out" / "evaluation.json");
        CHECK(rep.find("mape_pct") != std::string::npos);
        CHECK(slurp(fx.dir / "ev_out" / "forecast.csv") ==
              slurp(out / "forecast.csv"));
    }
}

TEST_CASE("ex-ante forecast emits mixture artifacts and density slices") {
    CliFixture fx;
    REQUIRE(run_cli("test " + fx.base("test_out")) == 0);
    const std::string model = (fx.dir / "test_out" / "model.json").string();
    REQUIRE(run_cli("forecast --ex-ante --paths 20 --model " + model + " " +
                    fx.base("ea_out")) == 0);

    const fs::path out = fx.dir / "ea_out";
    for (const char* f : {"forecast.csv", "paths.csv", "density_jan15.csv",
                          "density_apr15.csv", "density_jul15.csv",
                          "density_oct15.csv"})
        CHECK_MESSAGE(fs::exists(out / f), f);

    SUBCASE("per-path file has one row per day and path") {
        std::stringstream ss(slurp(out / "paths.csv"));
        std::string line;
        std::getline(ss, line);
        CHECK(line == "date,path_id,mu_log,sigma_log");
        int rows = 0;
        while (std::getline(ss, line))
            if (!line.empty()) ++rows;
        CHECK(rows == 365 * 20);
    }

    SUBCASE("density slices parse back as monotone CDFs with positive PDF") {
        std::stringstream ss(slurp(out / "density_jul15.csv"));
        std::string line;
        std::getline(ss, line);
        CHECK(line == "consumption_gwh,cdf,pdf");
        double prev_x = 0, prev_cdf = -1;
        int rows = 0;
        while (std::getline(ss, line)) {
            auto f = split(line);
            REQUIRE(f.size() == 3);
            const double x = std::stod(f[0]);
            const double cdf = std::stod(f[1]);
            CHECK(x > prev_x);
            CHECK(cdf >= prev_cdf);
            CHECK(std::stod(f[2]) > 0.0);
            prev_x = x;
            prev_cdf = cdf;
            ++rows;
        }
        CHECK(rows == 201);
        CHECK(prev_cdf > 0.99);
    }
}

TEST_CASE("error paths exit nonzero without leaving outputs") {
    CliFixture fx;

    SUBCASE("validation range outside the data names the gap") {
        std::ofstream out(fx.config, std::ios::app);
        out << "segmentation.validation_first = 2014-01-01\n"
            << "segmentation.validation_last = 2014-12-31\n";
        out.close();
        CHECK(run_cli("validate " + fx.base("bad_out")) != 0);
        CHECK_FALSE(fs::exists(fx.dir / "bad_out"));
        const std::string log = slurp("cli_stdout.log");
        CHECK(log.find("error:") != std::string::npos);
    }
    SUBCASE("missing seed is rejected") {
        fs::path cfg2 = fx.dir / "noseed.conf";
        std::ofstream out(cfg2);
        out << "data.daily_csv = " << fx.data_csv.string() << "\n";
        out.close();
        CHECK(run_cli("ingest --config " + cfg2.string() + " --out " +
                      (fx.dir / "x").string()) != 0);
    }
    SUBCASE("forecast requires exactly one mode flag") {
        CHECK(run_cli("forecast " + fx.base("y")) != 0);
        CHECK(run_cli("forecast --ex-post --ex-ante " + fx.base("y")) != 0);
    }
    SUBCASE("malformed config line is reported with its number") {
        fs::path cfg2 = fx.dir / "broken.conf";
        std::ofstream out(cfg2);
        out << "seed = 1\nthis line has no equals sign\n";
        out.close();
        CHECK(run_cli("ingest --config " + cfg2.string() + " --out " +
                      (fx.dir / "x").string()) != 0);
        CHECK(slurp("cli_stdout.log").find("line 2") != std::string::npos);
    }
}
