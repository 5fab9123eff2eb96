#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "pfraud/serialize.hpp"
#include "pfraud/timeline.hpp"

namespace fs = std::filesystem;
using pfraud::cli::run;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pfraud_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int call(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }
    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }
    fs::path sub(const std::string& name) {
        const auto p = dir_ / name;
        fs::create_directories(p);
        return p;
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, SimulateIsDeterministic) {
    const auto a = sub("a"), b = sub("b");
    const std::vector<std::string> common{"--clients", "20", "--seed", "7", "--params", "0.05,0.001",
                                          "--family", "linear", "--horizon", "90", "--fraud-proportion", "0.05"};
    auto args_a = std::vector<std::string>{"simulate", "--output-dir", a.string()};
    auto args_b = std::vector<std::string>{"simulate", "--output-dir", b.string()};
    args_a.insert(args_a.end(), common.begin(), common.end());
    args_b.insert(args_b.end(), common.begin(), common.end());
    ASSERT_EQ(call(args_a), 0) << err_.str();
    ASSERT_EQ(call(args_b), 0) << err_.str();
    EXPECT_EQ(slurp(a / "transactions.csv"), slurp(b / "transactions.csv"));
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));

    const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
    EXPECT_EQ(m["seed"], 7);
    EXPECT_EQ(m["n_clients"], 20);
    EXPECT_EQ(m["horizon_days"], 90.0);
    EXPECT_EQ(m["fraud_model"]["family"], "linear");
    EXPECT_EQ(m["fraud_model"]["params"][0], 0.05);
    EXPECT_EQ(m["fraud_model"]["params"][1], 0.001);
    EXPECT_EQ(pfraud::ingest_csv(a / "transactions.csv").size(), 20u);
}

TEST_F(Cli, MissingOutputDirIsUsageError) {
    EXPECT_EQ(call({"simulate", "--output-dir", (dir_ / "nope").string(), "--genuine-rate", "1"}), 2);
    EXPECT_NE(err_.str().find("does not exist"), std::string::npos);
}

TEST_F(Cli, InvalidSpecIsUsageError) {
    EXPECT_EQ(call({"simulate", "--output-dir", dir_.string(), "--params", "-1", "--genuine-rate", "1"}), 2);
    EXPECT_EQ(call({"simulate", "--output-dir", dir_.string(), "--params", "0.1"}), 2);
    EXPECT_EQ(call({"simulate", "--output-dir", dir_.string(), "--bogus"}), 2);
    EXPECT_EQ(call({}), 2);
    EXPECT_EQ(call({"--help"}), 0);
}

TEST_F(Cli, RegionDefaultsAndErrors) {
    ASSERT_EQ(call({"region", "--output-dir", dir_.string()}), 0) << err_.str();
    for (const char* name : {"region_linear_T0p02.csv", "region_linear_T0p2.csv", "region_linear_T20.csv"})
        EXPECT_TRUE(fs::exists(dir_ / name)) << name;
    const auto r2 = sub("r2");
    ASSERT_EQ(call({"region", "--output-dir", r2.string(), "--resolution", "2", "--horizons", "0.2"}), 0);
    const auto text = slurp(r2 / "region_linear_T0p2.csv");
    EXPECT_EQ(text, "a,b,feasible\n0,-100,0\n0,100,1\n10,-100,0\n10,100,1\n");
    EXPECT_EQ(call({"region", "--output-dir", dir_.string(), "--a-max", "-1"}), 2);
    const auto r3 = sub("r3");
    ASSERT_EQ(call({"region", "--family", "constant", "--output-dir", r3.string(), "--horizons", "1"}), 0);
    EXPECT_EQ(slurp(r3 / "region_constant_T1.csv").substr(0, 16), "lambda,feasible\n");
}

TEST_F(Cli, ToyDatasetThroughEvaluate) {
    const auto csv = dir_ / "toy.csv";
    {
        std::ofstream out(csv);
        out << "client_id,timestamp,label\n";
        const int labels[] = {0, 0, 0, 0, 0, 0, 1, 0, 0};
        for (int i = 0; i < 9; ++i) out << "toy," << 1441065600 + 86400 * i << ',' << labels[i] << '\n';
    }
    // 6 of 9 transactions for training.
    const auto out_dir = sub("eval");
    ASSERT_EQ(call({"evaluate", "--input", csv.string(), "--output-dir", out_dir.string(), "--train-fraction",
                    "0.6666", "--plot-data"}),
              0)
        << err_.str();
    std::ifstream in(out_dir / "per_client.csv");
    const auto rows = pfraud::read_per_client_csv(in);
    ASSERT_EQ(rows.size(), 7u);
    for (const auto& r : rows) {
        ASSERT_TRUE(r.auc) << pfraud::model_label(r.model);
        if (r.model == pfraud::ModelName::NaiveStatic || !pfraud::is_dynamic(r.model)) EXPECT_EQ(*r.auc, 0.5);
        else EXPECT_EQ(*r.auc, 0.0) << pfraud::model_label(r.model);
    }
    for (const char* f : {"summary.csv", "summary.json", "relative_map.csv", "plot_data.csv", "diagnostics.log"})
        EXPECT_TRUE(fs::exists(out_dir / f)) << f;
}

TEST_F(Cli, EvaluatePipelineAndModelFilter) {
    const auto data = sub("data");
    ASSERT_EQ(call({"simulate", "--output-dir", data.string(), "--clients", "30", "--seed", "3", "--params", "0.08",
                    "--horizon", "60", "--fraud-proportion", "0.06", "--label-mode", "interval"}),
              0)
        << err_.str();
    const auto input = (data / "transactions.csv").string();

    const auto one = sub("one");
    ASSERT_EQ(call({"evaluate", "--input", input, "--output-dir", one.string(), "--models", "LinearStatic"}), 0)
        << err_.str();
    std::ifstream in(one / "per_client.csv");
    const auto rows = pfraud::read_per_client_csv(in);
    ASSERT_FALSE(rows.empty());
    for (const auto& r : rows) EXPECT_EQ(r.model, pfraud::ModelName::LinearStatic);
    EXPECT_EQ(slurp(one / "summary.csv").find("HomoStatic"), std::string::npos);

    // report rebuilds the same summaries from the detail file.
    const auto rep = sub("rep");
    ASSERT_EQ(call({"report", "--input", (one / "per_client.csv").string(), "--output-dir", rep.string()}), 0);
    EXPECT_EQ(slurp(rep / "summary.csv"), slurp(one / "summary.csv"));

    // fit and predict on the same input.
    const auto fits = sub("fits");
    ASSERT_EQ(call({"fit", "--input", input, "--output-dir", fits.string(), "--family", "quadratic"}), 0);
    const auto j = nlohmann::json::parse(slurp(fits / "fits_quadratic.json"));
    EXPECT_EQ(j.size(), 30u);
    const auto pred = sub("pred");
    ASSERT_EQ(call({"predict", "--input", input, "--output-dir", pred.string(), "--models",
                    "HomoStatic,HomoDynamic", "--window", "fixed:20"}),
              0)
        << err_.str();
    std::ifstream scores_in(pred / "scores.csv");
    const auto scores = pfraud::read_scores_csv(scores_in);
    EXPECT_EQ(scores.size(), 60u);
}

TEST_F(Cli, ConfigFileSuppliesFlags) {
    const auto data = sub("data");
    const auto cfg = dir_ / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# simulation defaults\nclients = 4\nseed=9\ngenuine-rate=2\nhorizon=10\nparams=0.3\n";
    }
    ASSERT_EQ(call({"simulate", "--config", cfg.string(), "--output-dir", data.string(), "--clients", "6"}), 0)
        << err_.str();
    const auto m = nlohmann::json::parse(slurp(data / "manifest.json"));
    EXPECT_EQ(m["n_clients"], 6);  // explicit flag wins
    EXPECT_EQ(m["seed"], 9);
    EXPECT_EQ(m["genuine_rate"], 2.0);
    EXPECT_EQ(call({"simulate", "--config", (dir_ / "absent.cfg").string(), "--output-dir", data.string()}), 2);
}

TEST_F(Cli, NoEligibleClientsFails) {
    const auto csv = dir_ / "clean.csv";
    {
        std::ofstream out(csv);
        out << "client_id,timestamp,label\na,1441065600,0\na,1441152000,0\n";
    }
    const auto out_dir = sub("e");
    EXPECT_EQ(call({"evaluate", "--input", csv.string(), "--output-dir", out_dir.string()}), 1);
    EXPECT_FALSE(fs::exists(out_dir / "summary.csv"));
    EXPECT_TRUE(fs::exists(out_dir / "diagnostics.log"));
}

TEST_F(Cli, BadInputReportsLine) {
    const auto csv = dir_ / "bad.csv";
    {
        std::ofstream out(csv);
        out << "client_id,timestamp,label\na,1441065600,0\na,1441152000,2\n";
    }
    EXPECT_EQ(call({"evaluate", "--input", csv.string(), "--output-dir", dir_.string()}), 2);
    EXPECT_NE(err_.str().find("line 3"), std::string::npos);
}
