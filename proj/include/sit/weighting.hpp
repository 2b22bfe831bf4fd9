#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sit/date.hpp"
#include "sit/market_data.hpp"

namespace sit {

/// Long-only, fully invested holdings.
struct Portfolio {
    std::vector<std::pair<std::string, double>> holdings;  // asset id -> fraction of budget
    Date as_of{};
    std::vector<std::string> warnings;

    double weight_sum() const;
};

struct WeightFitOptions {
    double tolerance = 1e-10;  // stop when max |w_new - w_old| falls below this
    std::size_t max_iterations = 10000;
};

struct WeightFit {
    Eigen::VectorXd weights;
    double objective = 0.0;  // sum_t (G w - y)_t^2
    std::size_t iterations = 0;
    bool converged = false;
};

/// Euclidean projection onto {w >= 0, sum w = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

double tracking_objective(const Eigen::MatrixXd& asset_returns, const Eigen::VectorXd& index_returns,
                          const Eigen::VectorXd& weights);

/// Projected-gradient least squares on the simplex, started from equal weights.
/// `asset_returns` is T x M; `index_returns` has length T.
WeightFit fit_tracking_weights(const Eigen::MatrixXd& asset_returns,
                               const Eigen::VectorXd& index_returns,
                               const WeightFitOptions& options = {});

/// Fits weights for `selected_ids` on the return window. Warns (in Portfolio::warnings)
/// when the window is shorter than the number of selected assets.
Portfolio optimize_weights(std::span<const std::string> selected_ids, const ReturnPanel& window,
                           Date as_of, const WeightFitOptions& options = {});

std::string portfolio_csv(const Portfolio& portfolio, bool header = true);
void write_portfolio_csv(const Portfolio& portfolio, const std::filesystem::path& path);

}  // namespace sit
