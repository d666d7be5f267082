#include "hcran/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace hcran;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hcran_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Config, RoundTrip) {
    SimulationConfig c;
    c.runs = 17;
    c.seed = 99;
    c.snr_db = {5.0, 15.0};
    c.csi = CsiKind::Estimated;
    c.csi_overrides[Scheme::FRPC] = CsiKind::Perfect;
    c.schemes = {Scheme::CICF, Scheme::TDIC};
    c.placement.rue_min = 120.0;
    c.pathloss.exponent = 3.5;
    const json j = to_json(c);
    const SimulationConfig back = config_from_json(j);
    EXPECT_EQ(to_json(back).dump(), j.dump());
    EXPECT_EQ(back.csi_for(Scheme::FRPC), CsiKind::Perfect);
}

TEST(Config, RejectsUnknownAndInvalid) {
    EXPECT_THROW(config_from_json(json{{"runz", 3}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"placement", {{"rue_distance", {1.0}}}}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"csi", "partial"}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"K", 5}, {"M", 4}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"schema_version", 7}}), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Aggregate, JsonRoundTrip) {
    SimulationConfig c;
    c.runs = 10;
    c.snr_db = {10.0};
    const auto res = run_sweep(c);
    const json j = to_json(res.aggregate);
    EXPECT_EQ(to_json(aggregate_from_json(j)).dump(), j.dump());
}

TEST(Cli, SimulateWritesOutputs) {
    const fs::path dir = scratch("simulate");
    cli::SimulateOptions opt;
    opt.overrides.runs = 3;
    opt.overrides.snr_db = {10.0};
    opt.out_dir = dir.string();
    opt.write_records = true;
    std::ostringstream out;
    EXPECT_EQ(cli::cmd_simulate(opt, out), cli::kOk);
    EXPECT_TRUE(fs::exists(dir / "config.json"));
    EXPECT_TRUE(fs::exists(dir / "aggregate.json"));
    EXPECT_TRUE(fs::exists(dir / "runs.ndjson"));
    EXPECT_NE(out.str().find("CICF"), std::string::npos);

    // The written config reproduces the run.
    const SimulationConfig again = load_config((dir / "config.json").string());
    EXPECT_EQ(again.runs, 3);

    std::ostringstream csv, err;
    EXPECT_EQ(cli::cmd_export({(dir / "aggregate.json").string(), "fig3", std::nullopt}, csv, err), cli::kOk);
    EXPECT_EQ(csv.str().rfind("snr_db,scheme,mean_rue_sum_rate,stderr\n", 0), 0u);
    std::ostringstream cdf;
    EXPECT_EQ(cli::cmd_export({(dir / "aggregate.json").string(), "fig7", 10.0}, cdf, err), cli::kOk);
    const std::string table = cdf.str();
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), kCdfPoints + 1);
    fs::remove_all(dir);
}

TEST(Cli, MissingConfigThrows) {
    cli::SimulateOptions opt;
    opt.config_path = "/nonexistent/config.json";
    std::ostringstream out;
    EXPECT_THROW(cli::cmd_simulate(opt, out), ConfigError);
}

TEST(Cli, UnknownFigureListsIds) {
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_export({"unused.json", "fig9", std::nullopt}, out, err), cli::kUsage);
    for (const auto& id : cli::figure_ids()) EXPECT_NE(err.str().find(id), std::string::npos);
}

TEST(Cli, InspectPrintsContract) {
    cli::InspectOptions opt;
    opt.overrides.snr_db = {20.0};
    std::ostringstream out;
    EXPECT_EQ(cli::cmd_inspect(opt, out), cli::kOk);
    EXPECT_NE(out.str().find("t1"), std::string::npos);
}

TEST(Cli, QuickValidationPasses) {
    std::ostringstream out;
    EXPECT_EQ(cli::cmd_validate("quick", out), cli::kOk) << out.str();
}

TEST(Config, ShippedFilesLoad) {
    const fs::path dir = fs::path(HCRAN_SOURCE_DIR) / "configs";
    EXPECT_EQ(to_json(load_config((dir / "default.json").string())).dump(), to_json(SimulationConfig{}).dump());
    EXPECT_EQ(load_config((dir / "estimated.json").string()).csi, CsiKind::Estimated);
}
