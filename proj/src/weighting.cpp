#include "sit/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"

namespace sit {

double Portfolio::weight_sum() const {
    double s = 0.0;
    for (const auto& [id, w] : holdings) s += w;
    return s;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const auto n = v.size();
    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        cumulative += sorted[static_cast<std::size_t>(i)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) theta = candidate;
    }
    Eigen::VectorXd w = (v.array() - theta).cwiseMax(0.0);
    const double total = w.sum();
    if (total > 0.0) w /= total;
    return w;
}

double tracking_objective(const Eigen::MatrixXd& asset_returns, const Eigen::VectorXd& index_returns,
                          const Eigen::VectorXd& weights) {
    return (asset_returns * weights - index_returns).squaredNorm();
}

WeightFit fit_tracking_weights(const Eigen::MatrixXd& asset_returns,
                               const Eigen::VectorXd& index_returns,
                               const WeightFitOptions& options) {
    const auto m = asset_returns.cols();
    if (m == 0) throw ParameterError("cannot fit weights for an empty selection");
    if (asset_returns.rows() != index_returns.size()) {
        throw ValidationError("asset and index return windows differ in length");
    }
    if (!asset_returns.allFinite() || !index_returns.allFinite()) {
        throw ValidationError("non-finite returns in the weighting window");
    }

    WeightFit fit;
    fit.weights = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    if (m == 1) {
        fit.objective = tracking_objective(asset_returns, index_returns, fit.weights);
        fit.converged = true;
        return fit;
    }

    // f(w) = 1/2 |G w - y|^2 has gradient G'G w - G'y with Lipschitz constant lambda_max(G'G).
    const Eigen::MatrixXd gram = asset_returns.transpose() * asset_returns;
    const Eigen::VectorXd gy = asset_returns.transpose() * index_returns;
    const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                                 .eigenvalues()
                                 .maxCoeff();
    if (lipschitz > 0.0) {
        const double step = 1.0 / lipschitz;
        for (std::size_t it = 1; it <= options.max_iterations; ++it) {
            const Eigen::VectorXd grad = gram * fit.weights - gy;
            Eigen::VectorXd next = project_to_simplex(fit.weights - step * grad);
            const double change = (next - fit.weights).cwiseAbs().maxCoeff();
            fit.weights = std::move(next);
            fit.iterations = it;
            if (change < options.tolerance) {
                fit.converged = true;
                break;
            }
        }
    } else {
        fit.converged = true;
    }
    fit.objective = tracking_objective(asset_returns, index_returns, fit.weights);
    return fit;
}

Portfolio optimize_weights(std::span<const std::string> selected_ids, const ReturnPanel& window,
                           Date as_of, const WeightFitOptions& options) {
    if (selected_ids.empty()) throw ParameterError("cannot fit weights for an empty selection");
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < window.asset_ids.size(); ++j) column.emplace(window.asset_ids[j], j);
    std::vector<std::size_t> cols;
    for (const auto& id : selected_ids) {
        auto it = column.find(id);
        if (it == column.end()) throw ValidationError("selected asset '" + id + "' has no returns");
        cols.push_back(it->second);
    }
    const auto sub = window.select_columns(cols);
    const auto fit = fit_tracking_weights(sub.returns, sub.index_returns, options);

    Portfolio portfolio;
    portfolio.as_of = as_of;
    for (std::size_t j = 0; j < selected_ids.size(); ++j) {
        portfolio.holdings.emplace_back(selected_ids[j], fit.weights(static_cast<Eigen::Index>(j)));
    }
    if (window.size() < selected_ids.size()) {
        portfolio.warnings.push_back(fmt::format("weighting window of {} periods is shorter than the {} "
                                                 "selected assets",
                                                 window.size(), selected_ids.size()));
    }
    if (!fit.converged) {
        portfolio.warnings.push_back(
            fmt::format("weight fit stopped after {} iterations without converging", fit.iterations));
    }
    return portfolio;
}

std::string portfolio_csv(const Portfolio& portfolio, bool header) {
    std::string text = header ? "asset,weight,as_of\n" : "";
    const auto date = format_date(portfolio.as_of);
    for (const auto& [id, w] : portfolio.holdings) {
        text += fmt::format("{},{},{}\n", id, csv::format_double(w), date);
    }
    return text;
}

void write_portfolio_csv(const Portfolio& portfolio, const std::filesystem::path& path) {
    csv::write_file_atomic(path, portfolio_csv(portfolio));
}

}  // namespace sit
