#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sit/backtest.hpp"

namespace sit {

/// Writes residual_stats.csv, long_horizon.csv, residual_curve.csv, residuals.csv,
/// returns.csv, holdings.csv and summary.txt under `dir`.
void write_backtest_report(const BacktestReport& report, const std::filesystem::path& dir);

std::string format_backtest_summary(const BacktestReport& report);

/// Cross-portfolio Levene test at one horizon, run over the portfolios whose signed-rank
/// test did not reject a zero median.
struct LeveneComparison {
    std::size_t horizon = 0;
    std::vector<std::string> included;
    std::optional<TestResult> result;
    std::string note;
};

std::vector<LeveneComparison> compare_variances(const std::vector<BacktestReport>& reports);

/// Side-by-side tables (rows: horizons, columns: portfolios) plus levene.csv under `dir`.
void write_comparison(const std::vector<BacktestReport>& reports, const std::filesystem::path& dir);

}  // namespace sit
