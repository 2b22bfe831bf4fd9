#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "sit/backtest.hpp"
#include "sit/errors.hpp"
#include "sit/presets.hpp"
#include "sit/report.hpp"
#include "sit/synth.hpp"
#include "support.hpp"

using namespace sit;

namespace {

PricePanel small_market(std::size_t assets, std::size_t days, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.assets = assets;
    cfg.days = days;
    cfg.seed = seed;
    return generate_market(cfg).panel;
}

BacktestSettings short_settings() {
    BacktestSettings s;
    s.correlation = {20, true, 0.1};
    s.weight_window = 60;
    s.horizons = {1, 10};
    s.long_horizons = {50};
    s.sample_size = 40;
    return s;
}

Selector fixed_selector(std::vector<std::size_t> indices) {
    return [indices](const SelectionContext&) {
        RebalanceChoice c;
        c.selected.indices = indices;
        c.selected.provenance.assign(indices.size(), {1});
        return c;
    };
}

Selector everything_selector() {
    return [](const SelectionContext& ctx) {
        RebalanceChoice c;
        c.selected.indices.resize(ctx.distances.size());
        std::iota(c.selected.indices.begin(), c.selected.indices.end(), std::size_t{0});
        c.selected.provenance.assign(ctx.distances.size(), {1});
        return c;
    };
}

}  // namespace

TEST(QuarterEnds, LastRowOfEachQuarterMonth) {
    std::vector<Date> dates;
    for (auto s : {"2020-03-30", "2020-03-31", "2020-04-01", "2020-06-29", "2020-06-30", "2020-07-01",
                   "2020-09-30", "2020-12-30"}) {
        dates.push_back(parse_iso_date(s));
    }
    EXPECT_EQ(quarter_end_rows(dates), (std::vector<std::size_t>{1, 4, 6, 7}));
}

TEST(UniverseDistances, TopKByImpliedCapAtRow) {
    const auto panel = small_market(30, 400, 3);
    const auto d = universe_distances(panel, 300, 10, {20, true, 0.1});
    EXPECT_EQ(d.size(), 10u);
    const auto caps = panel.market_caps_at(300);
    std::vector<std::string> ids;
    for (const auto& a : panel.assets) ids.push_back(a.id);
    const auto ranking = mc_ranking(ids, caps);
    EXPECT_TRUE(std::equal(d.mc_rank_order.begin(), d.mc_rank_order.end(), ranking.begin()));
    EXPECT_THROW(universe_distances(panel, 300, 31, {20, true, 0.1}), ParameterError);
}

TEST(Backtest, FullReplicationTracksExactly) {
    const auto panel = small_market(40, 700, 5);
    auto settings = short_settings();
    settings.weighting = WeightingMode::index_weights;
    const auto report = run_backtest(everything_selector(), 40, panel, settings, "full");
    ASSERT_FALSE(report.rebalances.empty());
    for (const auto& h : report.horizons)
        for (double v : h.residuals.values) EXPECT_LT(std::abs(v), 1e-8);
    for (const auto& h : report.long_horizons)
        for (double v : h.residuals.values) EXPECT_LT(std::abs(v), 1e-8);
    EXPECT_LT(report.max_abs_residual, 1e-8);
}

TEST(Backtest, E1SelectsTopThirtyAtEachRebalance) {
    const auto panel = small_market(50, 700, 6);
    const auto plan = preset_plan(Preset::E1, 50, 40);
    SaConfig cfg;
    cfg.sweeps = 10;
    cfg.restarts = 1;
    const auto report = run_backtest(plan, panel, cfg, short_settings());
    ASSERT_GE(report.rebalances.size(), 2u);
    std::vector<std::string> ids;
    for (const auto& a : panel.assets) ids.push_back(a.id);
    for (const auto& r : report.rebalances) {
        const auto ranking = mc_ranking(ids, panel.market_caps_at(r.row));
        const std::vector<std::string> top(ranking.begin(), ranking.begin() + 30);
        EXPECT_EQ(r.selected, top);
        EXPECT_NEAR(r.portfolio.weight_sum(), 1.0, 1e-9);
    }
}

TEST(Backtest, HandChainedReturnsAcrossTwoRebalances) {
    const auto panel = small_market(12, 400, 7);
    auto settings = short_settings();
    settings.rebalance_rows = {150, 260};
    const auto report = run_backtest(fixed_selector({0, 2, 5}), 12, panel, settings, "fixed");
    ASSERT_EQ(report.rebalances.size(), 2u);
    ASSERT_EQ(report.portfolio_returns.size(), 400u - 151u);

    // Drifting weights: w_i <- w_i (1 + r_i) / (1 + r_p) after each day.
    std::vector<double> expected;
    for (std::size_t k = 0; k < 2; ++k) {
        const auto& rb = report.rebalances[k];
        const std::size_t stop = k == 0 ? report.rebalances[1].row : 399;
        std::vector<std::pair<Eigen::Index, double>> w;
        for (const auto& [id, weight] : rb.portfolio.holdings) {
            const auto it = std::find_if(panel.assets.begin(), panel.assets.end(),
                                         [&](const Asset& a) { return a.id == id; });
            w.emplace_back(it - panel.assets.begin(), weight);
        }
        for (std::size_t t = rb.row + 1; t <= stop; ++t) {
            double rp = 0.0;
            for (const auto& [c, weight] : w) {
                rp += weight * (panel.prices(static_cast<Eigen::Index>(t), c) /
                                    panel.prices(static_cast<Eigen::Index>(t - 1), c) - 1.0);
            }
            for (auto& [c, weight] : w) {
                weight *= panel.prices(static_cast<Eigen::Index>(t), c) /
                          panel.prices(static_cast<Eigen::Index>(t - 1), c) / (1.0 + rp);
            }
            expected.push_back(rp);
        }
    }
    ASSERT_EQ(expected.size(), report.portfolio_returns.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(report.portfolio_returns[i], expected[i], 1e-13);
    EXPECT_EQ(report.dates.front(), panel.dates[151]);
    EXPECT_NEAR(report.index_returns.front(), panel.index_level(151) / panel.index_level(150) - 1.0, 1e-15);
}

TEST(Backtest, StatisticsRecomputeFromStoredSeries) {
    const auto panel = small_market(20, 600, 8);
    const auto report = run_backtest(fixed_selector({0, 1, 3, 7}), 20, panel, short_settings(), "x");
    for (const auto& h : report.horizons) {
        ASSERT_FALSE(h.residuals.values.empty()) << h.note;
        EXPECT_EQ(h.mean, mean(h.residuals.values));
        EXPECT_EQ(h.variance, sample_variance(h.residuals.values));
        ASSERT_TRUE(h.wilcoxon.has_value());
        EXPECT_EQ(h.wilcoxon->statistic, wilcoxon_signed_rank(h.residuals.values).statistic);
        for (std::size_t i = 0; i < h.residuals.values.size(); ++i) {
            const auto t = h.residuals.sample_times[i];
            EXPECT_EQ(h.residuals.values[i], cumulative_return(report.portfolio_returns, t, h.horizon) -
                                                 cumulative_return(report.index_returns, t, h.horizon));
        }
    }
    auto copy = report;
    compile_statistics(copy, short_settings());
    EXPECT_EQ(copy.horizons.size(), report.horizons.size());
    EXPECT_EQ(copy.max_abs_residual, report.max_abs_residual);
}

TEST(Backtest, TooLittleHistoryIsRangeError) {
    const auto panel = small_market(10, 80, 9);
    auto settings = short_settings();
    settings.correlation.lookback = 30;
    EXPECT_THROW(run_backtest(fixed_selector({0, 1}), 10, panel, settings), RangeError);
}

TEST(Backtest, ShortEvaluationLeavesNotes) {
    const auto panel = small_market(10, 330, 10);
    auto settings = short_settings();
    settings.horizons = {1, 300};
    const auto report = run_backtest(fixed_selector({0, 1}), 10, panel, settings);
    ASSERT_EQ(report.horizons.size(), 2u);
    EXPECT_TRUE(report.horizons[1].residuals.values.empty());
    EXPECT_FALSE(report.horizons[1].note.empty());
}

TEST(Backtest, RandomSelectorIsSeededAndInRange) {
    const auto panel = small_market(30, 500, 11);
    const auto a = run_backtest(random_selector(8, 20, 99), 30, panel, short_settings());
    const auto b = run_backtest(random_selector(8, 20, 99), 30, panel, short_settings());
    ASSERT_EQ(a.rebalances.size(), b.rebalances.size());
    for (std::size_t i = 0; i < a.rebalances.size(); ++i) {
        EXPECT_EQ(a.rebalances[i].selected, b.rebalances[i].selected);
        EXPECT_EQ(a.rebalances[i].selected.size(), 8u);
    }
    EXPECT_EQ(a.portfolio_returns, b.portfolio_returns);
    EXPECT_THROW(random_selector(21, 20, 1), ParameterError);
}

TEST(Report, WritesAllFilesAndComparison) {
    const auto panel = small_market(20, 600, 12);
    const auto a = run_backtest(fixed_selector({0, 1, 2}), 20, panel, short_settings(), "A");
    const auto b = run_backtest(fixed_selector({3, 9, 11, 15}), 20, panel, short_settings(), "B");
    sit::test::TempDir dir;
    write_backtest_report(a, dir / "A");
    for (auto f : {"residual_stats.csv", "long_horizon.csv", "residual_curve.csv", "residuals.csv", "returns.csv",
                   "holdings.csv", "summary.txt"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / "A" / f)) << f;
    }
    const auto stats = sit::test::read_text(dir / "A" / "residual_stats.csv");
    EXPECT_EQ(stats.substr(0, stats.find('\n')), "horizon,n,mean,variance,wilcoxon_w,wilcoxon_p,wilcoxon_rejected");

    write_comparison({a, b}, dir / "cmp");
    const auto table = sit::test::read_text(dir / "cmp" / "table_mean.csv");
    EXPECT_EQ(table.substr(0, table.find('\n')), "horizon,A,B");
    const auto cmp = compare_variances({a, b});
    ASSERT_EQ(cmp.size(), 2u);
    for (const auto& c : cmp) {
        if (c.included.size() >= 2) {
            ASSERT_TRUE(c.result.has_value());
        } else {
            EXPECT_FALSE(c.note.empty());
        }
    }
}
