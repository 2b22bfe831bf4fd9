#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sit/evaluation.hpp"
#include "sit/market_data.hpp"
#include "sit/multi_stage.hpp"
#include "sit/solver.hpp"
#include "sit/statistics.hpp"
#include "sit/weighting.hpp"

namespace sit {

enum class WeightingMode {
    tracking_error,  // least-squares fit on the trailing daily window
    index_weights,   // market-cap weights of the selected assets at the rebalance date
};

struct BacktestSettings {
    /// Trailing weekly log returns used for correlations (260 weeks is five years).
    CorrelationSettings correlation{260, true, 0.1};
    /// Trailing daily simple returns used to fit weights.
    std::size_t weight_window = 250;
    std::vector<std::size_t> horizons{1, 10, 50, 100};
    /// One and two years in business days.
    std::vector<std::size_t> long_horizons{250, 500};
    std::size_t sample_size = 200;
    Sampling sampling = Sampling::even;
    WeightingMode weighting = WeightingMode::tracking_error;
    /// Explicit rebalance rows; empty means every calendar-quarter end (Mar/Jun/Sep/Dec).
    std::vector<std::size_t> rebalance_rows;
};

/// What a selector sees at one rebalance.
struct SelectionContext {
    const DistanceMatrix& distances;  // top-K universe in MC order at the rebalance date
    std::size_t rebalance_number = 0;  // 0-based
    Date date{};
};

struct RebalanceChoice {
    SelectedSet selected;  // positions in `SelectionContext::distances`
    std::vector<double> stage_objectives;
};

using Selector = std::function<RebalanceChoice(const SelectionContext&)>;

struct RebalanceRecord {
    std::size_t row = 0;
    Date date{};
    std::vector<std::string> selected;  // asset ids in MC order
    std::vector<std::vector<std::size_t>> provenance;
    std::vector<double> stage_objectives;
    Portfolio portfolio;
};

struct HorizonResult {
    std::size_t horizon = 0;
    ResidualSeries residuals;
    double mean = 0.0;
    double variance = 0.0;
    std::optional<TestResult> wilcoxon;
    std::string note;  // why a statistic is missing, if it is
};

struct LongHorizonResult {
    std::size_t horizon = 0;
    ResidualSeries residuals;
    double mean_abs = 0.0;
    double variance_abs = 0.0;
    std::string note;
};

struct BacktestReport {
    std::string label;
    std::vector<Date> dates;  // evaluation days
    std::vector<double> index_returns;
    std::vector<double> portfolio_returns;
    std::vector<RebalanceRecord> rebalances;
    std::vector<HorizonResult> horizons;
    std::vector<LongHorizonResult> long_horizons;
    std::vector<double> residual_curve;
    double max_abs_residual = 0.0;
};

/// Correlation distances of the top-K assets by market cap implied at `row`, estimated from
/// weekly log returns of the panel cut at `row`.
DistanceMatrix universe_distances(const PricePanel& panel, std::size_t row, std::size_t k,
                                  const CorrelationSettings& settings);

/// Last panel row of every March, June, September and December.
std::vector<std::size_t> quarter_end_rows(const std::vector<Date>& dates);

/// Daily returns of buy-and-hold segments: the portfolio set at each rebalance row is held,
/// drifting with prices, until the next rebalance. Returns entries for rows
/// rebalances.front().row + 1 .. T - 1.
std::vector<double> portfolio_daily_returns(const PricePanel& panel,
                                            const std::vector<RebalanceRecord>& rebalances);

/// Selection by the stage plan: each stage solved with `cfg`, union truncated to m_star.
Selector plan_selector(const StagePlan& plan, const SaConfig& cfg);

/// `count` assets drawn uniformly from the top `h` at each rebalance.
Selector random_selector(std::size_t count, std::size_t h, std::uint64_t seed);

/// Rebalances at every feasible rebalance row, chains daily returns between them and
/// compiles residual statistics. `universe_size` is K. Throws RangeError when no rebalance
/// date has enough history.
BacktestReport run_backtest(const Selector& selector, std::size_t universe_size,
                            const PricePanel& panel, const BacktestSettings& settings,
                            std::string label = {});

BacktestReport run_backtest(const StagePlan& plan, const PricePanel& panel, const SaConfig& cfg,
                            const BacktestSettings& settings);

/// Residual statistics and curve from the stored return series.
void compile_statistics(BacktestReport& report, const BacktestSettings& settings);

}  // namespace sit
