#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sit/date.hpp"

namespace sit {

struct Asset {
    std::string id;
    double market_cap = 0.0;  // currency units, as of the panel's reference date
};

/// Aligned close prices for L assets plus the index level over T business days.
///
/// The reference date for `Asset::market_cap` is the last row of the panel; the
/// market cap implied at any earlier row scales with the asset's price.
struct PricePanel {
    std::vector<Date> dates;
    std::vector<Asset> assets;
    Eigen::MatrixXd prices;  // T x L
    Eigen::VectorXd index_level;
    std::vector<std::string> load_log;

    std::size_t periods() const { return dates.size(); }
    std::size_t asset_count() const { return assets.size(); }

    /// Throws ValidationError when any panel invariant is broken.
    void validate() const;

    /// Rows [first, last).
    PricePanel slice_rows(std::size_t first, std::size_t last) const;

    /// Market caps implied at `row`, assuming constant share counts.
    std::vector<double> market_caps_at(std::size_t row) const;
};

/// Column names for the price CSV and the market-cap sidecar.
struct CsvSchema {
    std::string date_column = "date";
    std::string index_column = "index";
    std::string mc_id_column = "asset";
    std::string mc_value_column = "market_cap";
    /// Value in the date column marking an in-file market-cap row (used when no sidecar is given).
    std::string mc_row_label = "MC";
};

/// Loads a price CSV. When `market_caps` is empty, the market caps are read from the
/// row whose date cell equals `schema.mc_row_label`. Rows with a missing price are dropped
/// and listed in `load_log`.
PricePanel load_price_panel(const std::filesystem::path& prices,
                            const std::filesystem::path& market_caps,
                            const CsvSchema& schema = {});

enum class Frequency { daily, weekly };

struct ReturnPanel {
    std::vector<Date> periods;  // end date of each period
    std::vector<std::string> asset_ids;
    Eigen::MatrixXd returns;  // T' x L
    Eigen::VectorXd index_returns;
    Frequency frequency = Frequency::daily;

    std::size_t size() const { return periods.size(); }

    /// Keeps the given asset columns, in the given order.
    ReturnPanel select_columns(std::span<const std::size_t> columns) const;
    /// Keeps the most recent `count` periods.
    ReturnPanel tail(std::size_t count) const;
};

/// Row indices sampled for `frequency`: every row for daily, the last row of each ISO week for weekly.
std::vector<std::size_t> sample_rows(const std::vector<Date>& dates, Frequency frequency);

ReturnPanel compute_log_returns(const PricePanel& panel, Frequency frequency);

/// Daily simple returns P_t / P_{t-1} - 1 for assets and index.
ReturnPanel compute_simple_returns(const PricePanel& panel);

struct CorrelationSettings {
    std::size_t lookback = 260;
    /// Linear weights n / sum(n) over the window (most recent heaviest); uniform when false.
    bool linear_weights = true;
    double shrinkage = 0.1;
};

struct EstimatorMeta {
    double shrinkage = 0.0;
    bool linear_weights = true;
    std::size_t lookback = 0;
    double target_correlation = 0.0;
    double min_eigenvalue = 0.0;  // before any repair
    bool psd_repaired = false;
};

struct CorrelationMatrix {
    Eigen::MatrixXd rho;
    std::vector<std::string> asset_ids;
    EstimatorMeta meta;
};

/// Weighted sample correlation over the trailing window, shrunk toward the
/// constant-correlation target.
CorrelationMatrix estimate_correlation(const ReturnPanel& returns, const CorrelationSettings& settings);

/// Pairwise correlation distances, with rows and columns in descending market-cap order.
struct DistanceMatrix {
    Eigen::MatrixXd d;
    std::vector<std::string> mc_rank_order;  // matrix index -> asset id

    std::size_t size() const { return mc_rank_order.size(); }
};

/// Asset ids sorted by descending market cap; equal caps fall back to id order.
std::vector<std::string> mc_ranking(std::span<const Asset> assets);
std::vector<std::string> mc_ranking(std::span<const std::string> ids, std::span<const double> caps);

double correlation_distance(double rho);

DistanceMatrix correlation_to_distance(const CorrelationMatrix& rho,
                                       std::span<const std::string> mc_ranking);

void write_distance_csv(const DistanceMatrix& d, const std::filesystem::path& path);
std::string distance_csv(const DistanceMatrix& d);
DistanceMatrix read_distance_csv(const std::filesystem::path& path);

}  // namespace sit
