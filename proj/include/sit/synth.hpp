#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sit/market_data.hpp"

namespace sit {

/// Factor-model market: daily log price increments are drift + loadings . factors + idiosyncratic
/// noise; market caps follow a Pareto law; the index is cap-weighted with constant share counts.
struct SynthConfig {
    std::size_t assets = 100;
    std::size_t days = 1500;
    std::size_t factors = 3;
    std::uint64_t seed = 1;
    double factor_vol = 0.01;   // daily vol of the market factor; other factors get 60% of it
    double idio_vol = 0.012;    // typical daily idiosyncratic vol
    double drift = 0.0002;
    double pareto_shape = 1.5;  // market-cap tail exponent
    Date start{std::chrono::year{2015}, std::chrono::January, std::chrono::day{1}};

    void validate() const;
};

struct SynthMarket {
    PricePanel panel;
    std::vector<double> shares;  // constant share counts
    Eigen::MatrixXd loadings;    // L x F
};

SynthMarket generate_market(const SynthConfig& config);

std::string price_csv(const PricePanel& panel, const CsvSchema& schema = {});
std::string market_cap_csv(const PricePanel& panel, const CsvSchema& schema = {});

/// Writes the price panel and the market-cap sidecar.
void write_market(const PricePanel& panel, const std::filesystem::path& prices,
                  const std::filesystem::path& market_caps, const CsvSchema& schema = {});

}  // namespace sit
