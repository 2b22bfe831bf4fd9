#include "sit/synth.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"
#include "sit/rng.hpp"

namespace sit {

void SynthConfig::validate() const {
    if (assets < 1) throw ValidationError("synthetic market needs at least 1 asset");
    if (days < 2) throw ValidationError("synthetic market needs at least 2 days");
    if (factors < 1) throw ValidationError("synthetic market needs at least 1 factor");
    if (!(factor_vol >= 0.0) || !(idio_vol >= 0.0)) throw ValidationError("volatilities must be non-negative");
    if (!(pareto_shape > 0.0)) throw ValidationError("pareto_shape must be positive");
    if (!start.ok()) throw ValidationError("invalid start date");
}

SynthMarket generate_market(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const auto l = static_cast<Eigen::Index>(config.assets);
    const auto f = static_cast<Eigen::Index>(config.factors);
    const auto t_count = static_cast<Eigen::Index>(config.days);

    SynthMarket market;
    auto& panel = market.panel;
    const int width = static_cast<int>(std::to_string(config.assets).size());
    for (std::size_t i = 0; i < config.assets; ++i) {
        panel.assets.push_back(Asset{fmt::format("A{:0{}d}", i + 1, width), 0.0});
    }

    Date day = is_weekday(config.start) ? config.start : next_business_day(config.start);
    for (std::size_t t = 0; t < config.days; ++t) {
        panel.dates.push_back(day);
        day = next_business_day(day);
    }

    market.loadings.resize(l, f);
    Eigen::VectorXd idio(l);
    Eigen::VectorXd initial(l);
    market.shares.resize(config.assets);
    for (Eigen::Index i = 0; i < l; ++i) {
        market.loadings(i, 0) = 0.6 + 0.8 * rng.uniform();
        for (Eigen::Index k = 1; k < f; ++k) market.loadings(i, k) = 0.5 * rng.normal();
        idio(i) = config.idio_vol * (0.5 + rng.uniform());
        initial(i) = 10.0 + 90.0 * rng.uniform();
        const double cap = 1e9 * std::pow(1.0 - rng.uniform(), -1.0 / config.pareto_shape);
        market.shares[static_cast<std::size_t>(i)] = cap / initial(i);
    }

    panel.prices.resize(t_count, l);
    panel.index_level.resize(t_count);
    panel.prices.row(0) = initial.transpose();
    panel.index_level(0) = 1000.0;
    Eigen::VectorXd factor(f);
    for (Eigen::Index t = 1; t < t_count; ++t) {
        for (Eigen::Index k = 0; k < f; ++k) {
            factor(k) = (k == 0 ? 1.0 : 0.6) * config.factor_vol * rng.normal();
        }
        double cap_total = 0.0;
        double weighted_return = 0.0;
        for (Eigen::Index i = 0; i < l; ++i) {
            const double increment =
                config.drift + market.loadings.row(i).dot(factor) + idio(i) * rng.normal();
            const double prev = panel.prices(t - 1, i);
            const double next = prev * std::exp(increment);
            panel.prices(t, i) = next;
            const double cap = market.shares[static_cast<std::size_t>(i)] * prev;
            cap_total += cap;
            weighted_return += cap * (next / prev - 1.0);
        }
        panel.index_level(t) = panel.index_level(t - 1) * (1.0 + weighted_return / cap_total);
    }
    for (Eigen::Index i = 0; i < l; ++i) {
        panel.assets[static_cast<std::size_t>(i)].market_cap =
            market.shares[static_cast<std::size_t>(i)] * panel.prices(t_count - 1, i);
    }
    panel.validate();
    return market;
}

std::string price_csv(const PricePanel& panel, const CsvSchema& schema) {
    std::string text = schema.date_column + "," + schema.index_column;
    for (const auto& a : panel.assets) text += "," + a.id;
    text += "\n";
    for (std::size_t t = 0; t < panel.periods(); ++t) {
        const auto r = static_cast<Eigen::Index>(t);
        text += format_date(panel.dates[t]) + "," + csv::format_double(panel.index_level(r));
        for (Eigen::Index j = 0; j < panel.prices.cols(); ++j) {
            text += "," + csv::format_double(panel.prices(r, j));
        }
        text += "\n";
    }
    return text;
}

std::string market_cap_csv(const PricePanel& panel, const CsvSchema& schema) {
    std::string text = schema.mc_id_column + "," + schema.mc_value_column + "\n";
    for (const auto& a : panel.assets) text += a.id + "," + csv::format_double(a.market_cap) + "\n";
    return text;
}

void write_market(const PricePanel& panel, const std::filesystem::path& prices,
                  const std::filesystem::path& market_caps, const CsvSchema& schema) {
    csv::write_file_atomic(prices, price_csv(panel, schema));
    csv::write_file_atomic(market_caps, market_cap_csv(panel, schema));
}

}  // namespace sit
