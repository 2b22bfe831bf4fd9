#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sit/market_data.hpp"

namespace sit {

/// Universe and objective parameters of one selection problem.
///
/// Indices below are 0-based positions in market-cap order: the first `n` assets
/// are forced in, positions [n, h) are decided by the solver, [h, k) are excluded.
struct SelectionParams {
    std::size_t k = 0;
    std::size_t h = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    double alpha = 0.0;  // dissimilarity
    double beta = 0.0;   // centrality

    /// Throws ParameterError naming the violated inequality.
    void validate() const;
};

/// 0/1 assignment over the K candidates.
struct Selection {
    std::vector<std::uint8_t> x;

    std::size_t size() const { return x.size(); }
    bool contains(std::size_t i) const { return x[i] != 0; }
    std::size_t count() const;
    std::vector<std::size_t> indices() const;

    static Selection from_indices(std::size_t k, std::span<const std::size_t> indices);

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Lexicographic comparison of the selected index sets (smaller set first).
bool lexicographically_less(const Selection& a, const Selection& b);

class SelectionProblem {
public:
    SelectionProblem(DistanceMatrix d, const SelectionParams& params);

    const SelectionParams& params() const { return params_; }
    const Eigen::MatrixXd& distances() const { return d_.d; }
    double distance(std::size_t i, std::size_t j) const {
        return d_.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    /// row_sums()[i] = sum_j d[i][j] over the K-universe.
    const std::vector<double>& row_sums() const { return row_sums_; }
    const std::vector<std::string>& asset_ids() const { return d_.mc_rank_order; }
    const DistanceMatrix& distance_matrix() const { return d_; }

    std::size_t size() const { return params_.k; }
    std::size_t free_begin() const { return params_.n; }
    std::size_t free_end() const { return params_.h; }
    bool is_free(std::size_t i) const { return i >= params_.n && i < params_.h; }

    /// The selection containing the first `m` assets in MC order.
    Selection top_selection() const;

private:
    SelectionParams params_;
    DistanceMatrix d_;
    std::vector<double> row_sums_;
};

/// Truncates `d` to its top-K block and precomputes the row sums.
SelectionProblem build_problem(const DistanceMatrix& d, const SelectionParams& params);

/// Throws FeasibilityError naming the first violated constraint.
void check_feasible(const SelectionProblem& problem, const Selection& sel);
bool is_feasible(const SelectionProblem& problem, const Selection& sel);

/// beta * sum_{i in S} row_sum[i] - alpha/2 * sum_{i,j in S} d[i][j], summed in ascending index order.
double objective(const SelectionProblem& problem, const Selection& sel);

/// Change in objective when `out_idx` leaves and `in_idx` enters the selection. O(M).
double objective_delta_swap(const SelectionProblem& problem, const Selection& sel,
                            std::size_t out_idx, std::size_t in_idx);

/// Plain-text instance: "K H N M alpha beta" followed by K rows of the distance matrix.
void write_instance(const SelectionProblem& problem, std::ostream& out);
void write_instance(const SelectionProblem& problem, const std::filesystem::path& path);
SelectionProblem read_instance(std::istream& in);
SelectionProblem read_instance(const std::filesystem::path& path);

}  // namespace sit
