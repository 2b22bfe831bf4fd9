#include <gtest/gtest.h>

#include "sit/config.hpp"
#include "sit/errors.hpp"
#include "support.hpp"

using namespace sit;
using nlohmann::json;

namespace {

std::string config_error(const json& doc) {
    try {
        parse_run_config(doc, "/base");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(ResolveParameter, SymbolicForms) {
    EXPECT_DOUBLE_EQ(resolve_parameter("1/M", 20, 150, "x"), 1.0 / 20);
    EXPECT_DOUBLE_EQ(resolve_parameter("2/M", 20, 150, "x"), 2.0 / 20);
    EXPECT_DOUBLE_EQ(resolve_parameter("1/H", 20, 150, "x"), 1.0 / 150);
    EXPECT_DOUBLE_EQ(resolve_parameter(" 1 / H ", 20, 150, "x"), 1.0 / 150);
    EXPECT_DOUBLE_EQ(resolve_parameter(0.25, 20, 150, "x"), 0.25);
    EXPECT_THROW(resolve_parameter("1/K", 20, 150, "x"), ConfigError);
    EXPECT_THROW(resolve_parameter("abc", 20, 150, "x"), ConfigError);
    EXPECT_THROW(resolve_parameter(-1.0, 20, 150, "x"), ConfigError);
    EXPECT_THROW(resolve_parameter(true, 20, 150, "x"), ConfigError);
}

TEST(RunConfig, CustomStagesResolvePerStage) {
    const json doc = json::parse(R"({
        "k": 100, "h": 60, "n": 5, "name": "two", "m_star": 30,
        "stages": [{"m": 20, "alpha": "1/M", "beta": "1/H"}, {"m": 25, "alpha": "2/M", "beta": 0.5}]
    })");
    const auto cfg = parse_run_config(doc, "/base");
    ASSERT_EQ(cfg.plans.size(), 1u);
    const auto& plan = cfg.plans[0];
    EXPECT_EQ(plan.name, "two");
    EXPECT_EQ(plan.m_star, 30u);
    EXPECT_DOUBLE_EQ(plan.stages[0].alpha, 1.0 / 20);
    EXPECT_DOUBLE_EQ(plan.stages[0].beta, 1.0 / 60);
    EXPECT_DOUBLE_EQ(plan.stages[1].alpha, 2.0 / 25);
    EXPECT_EQ(plan.stages[1].n, 5u);
}

TEST(RunConfig, PresetsAndSettings) {
    const json doc = json::parse(R"({
        "data": {"prices": "data/p.csv", "market_caps": "/abs/mc.csv", "date_column": "Date"},
        "k": 500, "h": 150, "presets": ["E1", "E6"],
        "estimation": {"lookback": 104, "shrinkage": 0.2, "linear_weights": false},
        "solver": {"seed": 5, "restarts": 2, "sweeps": 100, "cooling": 0.9, "moves_per_sweep": 50},
        "backtest": {"horizons": [1, 5], "sample_size": 100, "sampling": "contiguous",
                     "weighting": "index_weights", "weight_window": 120},
        "output_dir": "results"
    })");
    const auto cfg = parse_run_config(doc, "/base");
    EXPECT_EQ(cfg.prices, std::filesystem::path("/base/data/p.csv"));
    EXPECT_EQ(cfg.market_caps, std::filesystem::path("/abs/mc.csv"));
    EXPECT_EQ(cfg.schema.date_column, "Date");
    EXPECT_EQ(cfg.output_dir, std::filesystem::path("/base/results"));
    ASSERT_EQ(cfg.plans.size(), 2u);
    EXPECT_EQ(cfg.plans[0].name, "E1");
    EXPECT_DOUBLE_EQ(cfg.plans[1].stages[0].beta, 1.0 / 150);
    EXPECT_EQ(cfg.backtest.correlation.lookback, 104u);
    EXPECT_FALSE(cfg.backtest.correlation.linear_weights);
    EXPECT_EQ(cfg.solver.rng_seed, 5u);
    EXPECT_EQ(*cfg.solver.moves_per_sweep, 50u);
    EXPECT_EQ(cfg.backtest.sampling, Sampling::contiguous);
    EXPECT_EQ(cfg.backtest.weighting, WeightingMode::index_weights);
    EXPECT_EQ(cfg.backtest.horizons, (std::vector<std::size_t>{1, 5}));
}

TEST(RunConfig, FieldLevelErrors) {
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "bogus": 1})")).find("bogus"), std::string::npos);
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "solver": {"cooling": 1.5}})")).find("solver"),
              std::string::npos);
    EXPECT_NE(config_error(json::parse(R"({"k": -3})")).find("k"), std::string::npos);
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "presets": ["E9"]})")).find("E9"), std::string::npos);
    const auto nm = config_error(json::parse(R"({"k": 10, "h": 8, "n": 3, "stages": [{"m": 2, "alpha": 0, "beta": 0}]})"));
    EXPECT_NE(nm.find("N <= M"), std::string::npos) << nm;
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "stages": [{"m": 2, "alpha": 0}]})")).find("stages[0]"),
              std::string::npos);
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "estimation": {"shrinkage": 2}})")).find("estimation.shrinkage"),
              std::string::npos);
    EXPECT_NE(config_error(json::parse(R"({"k": 10, "backtest": {"weighting": "x"}})")).find("backtest.weighting"),
              std::string::npos);
}

TEST(RunConfig, MalformedJsonFile) {
    sit::test::TempDir dir;
    sit::test::write_text(dir / "c.json", "{\"k\": 10,");
    EXPECT_THROW(load_run_config(dir / "c.json"), ConfigError);
    EXPECT_THROW(load_run_config(dir / "missing.json"), IoError);
}

TEST(Manifest, HashIsStableAndSensitive) {
    EXPECT_EQ(fnv1a64(""), 0xCBF29CE484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
    const auto a = parse_run_config(json::parse(R"({"k": 10, "solver": {"seed": 1}})"), "/b");
    const auto b = parse_run_config(json::parse(R"({"k": 10, "solver": {"seed": 2}})"), "/b");
    const auto ma = run_manifest(a, "select");
    EXPECT_EQ(ma, run_manifest(a, "select"));
    EXPECT_NE(ma, run_manifest(b, "select"));
    EXPECT_NE(ma.find("solver_seed 1"), std::string::npos);
    EXPECT_NE(ma.find("config_hash "), std::string::npos);
    EXPECT_NE(ma.find("tool sit "), std::string::npos);
}
