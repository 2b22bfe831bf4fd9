#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sit/market_data.hpp"
#include "sit/selection.hpp"

namespace sit::test {

/// Pearson correlation of random factor data; always a valid correlation matrix.
inline Eigen::MatrixXd random_correlation(std::size_t k, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> factor_count(1, 4);
    const int factors = factor_count(gen);
    const Eigen::Index periods = static_cast<Eigen::Index>(k) + 20;
    Eigen::MatrixXd f(periods, factors);
    for (Eigen::Index t = 0; t < periods; ++t)
        for (int j = 0; j < factors; ++j) f(t, j) = normal(gen);
    Eigen::MatrixXd x(periods, static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < x.cols(); ++i) {
        Eigen::VectorXd loading(factors);
        for (int j = 0; j < factors; ++j) loading(j) = 2.0 * normal(gen);
        std::uniform_real_distribution<double> noise_scale(0.05, 1.5);
        const double s = noise_scale(gen);
        for (Eigen::Index t = 0; t < periods; ++t) x(t, i) = f.row(t).dot(loading) + s * normal(gen);
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    const Eigen::MatrixXd cov = c.transpose() * c;
    const Eigen::VectorXd inv = cov.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd rho = inv.asDiagonal() * cov * inv.asDiagonal();
    rho = (0.5 * (rho + rho.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
    rho.diagonal().setOnes();
    return rho;
}

inline std::vector<std::string> numbered_ids(std::size_t k, const std::string& prefix = "S") {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < k; ++i) {
        std::ostringstream s;
        s << prefix << (i < 9 ? "0" : "") << i + 1;
        ids.push_back(s.str());
    }
    return ids;
}

/// Distances from a random correlation matrix; index order is MC order.
inline DistanceMatrix random_distances(std::size_t k, std::mt19937_64& gen) {
    CorrelationMatrix rho;
    rho.rho = random_correlation(k, gen);
    rho.asset_ids = numbered_ids(k);
    return correlation_to_distance(rho, rho.asset_ids);
}

inline DistanceMatrix distances_from(const Eigen::MatrixXd& d) {
    DistanceMatrix out;
    out.d = d;
    out.mc_rank_order = numbered_ids(static_cast<std::size_t>(d.rows()));
    return out;
}

/// Brute-force objective: beta * sum_i rowsum_i - alpha/2 * sum_ij d_ij over the selection.
inline double double_sum_objective(const Eigen::MatrixXd& d, const std::vector<std::size_t>& chosen,
                                   double alpha, double beta, std::size_t k) {
    double linear = 0.0;
    for (auto i : chosen)
        for (std::size_t j = 0; j < k; ++j) linear += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    double quad = 0.0;
    for (auto i : chosen)
        for (auto j : chosen) quad += d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return beta * linear - 0.5 * alpha * quad;
}

/// Every combination of `pick` elements of [lo, hi), in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t lo, std::size_t hi, std::size_t pick) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == pick) {
            out.push_back(cur);
            return;
        }
        for (std::size_t e = start; e < hi; ++e) {
            cur.push_back(e);
            self(self, e + 1);
            cur.pop_back();
        }
    };
    rec(rec, lo);
    return out;
}

class TempDir {
public:
    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() / ("sit_test_" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace sit::test
