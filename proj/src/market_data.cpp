#include "sit/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"

namespace sit {

namespace {

bool is_missing(const std::string& cell) {
    std::string trimmed;
    for (char c : cell) {
        if (c != ' ' && c != '\t') trimmed.push_back(c);
    }
    return trimmed.empty() || trimmed == "NA" || trimmed == "NaN" || trimmed == "nan" ||
           trimmed == "null";
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                      const std::string& file) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw ParseError(1, "column '" + name + "' not found in " + file);
    }
    return static_cast<std::size_t>(it - header.begin());
}

std::unordered_map<std::string, double> load_market_caps(const std::filesystem::path& path,
                                                         const CsvSchema& schema) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw ParseError(1, "empty market-cap file " + path.string());
    const auto header = csv::split_line(lines[0]);
    const auto id_col = column_of(header, schema.mc_id_column, path.string());
    const auto mc_col = column_of(header, schema.mc_value_column, path.string());
    std::unordered_map<std::string, double> caps;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i] == "\r") continue;
        const auto fields = csv::split_line(lines[i]);
        if (fields.size() != header.size()) {
            throw ParseError(i + 1, fmt::format("expected {} fields, found {} in {}", header.size(),
                                                fields.size(), path.string()));
        }
        double value = 0.0;
        if (!csv::parse_double(fields[mc_col], value)) {
            throw ParseError(i + 1, "invalid market cap '" + fields[mc_col] + "'");
        }
        if (!caps.emplace(fields[id_col], value).second) {
            throw ValidationError("duplicate market cap for asset '" + fields[id_col] + "'");
        }
    }
    return caps;
}

}  // namespace

void PricePanel::validate() const {
    const auto rows = dates.size();
    if (static_cast<std::size_t>(prices.rows()) != rows ||
        static_cast<std::size_t>(prices.cols()) != assets.size() ||
        static_cast<std::size_t>(index_level.size()) != rows) {
        throw ValidationError("price panel dimensions are inconsistent");
    }
    for (std::size_t t = 1; t < rows; ++t) {
        if (!(dates[t - 1] < dates[t])) {
            throw ValidationError("dates not strictly increasing at " + format_date(dates[t]));
        }
    }
    std::unordered_set<std::string> seen;
    for (const auto& a : assets) {
        if (!seen.insert(a.id).second) throw ValidationError("duplicate asset id '" + a.id + "'");
        if (!(a.market_cap > 0.0) || !std::isfinite(a.market_cap)) {
            throw ValidationError("market cap of '" + a.id + "' must be positive");
        }
    }
    for (std::size_t t = 0; t < rows; ++t) {
        if (!(index_level(t) > 0.0) || !std::isfinite(index_level(t))) {
            throw ValidationError("non-positive index level on " + format_date(dates[t]));
        }
        for (std::size_t j = 0; j < assets.size(); ++j) {
            const double p = prices(t, j);
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw ValidationError(fmt::format("non-positive price {} for asset '{}' on {}", p,
                                                  assets[j].id, format_date(dates[t])));
            }
        }
    }
}

PricePanel PricePanel::slice_rows(std::size_t first, std::size_t last) const {
    if (first > last || last > dates.size()) throw RangeError("invalid panel row slice");
    PricePanel out;
    out.dates.assign(dates.begin() + first, dates.begin() + last);
    out.assets = assets;
    const auto n = static_cast<Eigen::Index>(last - first);
    out.prices = prices.middleRows(static_cast<Eigen::Index>(first), n);
    out.index_level = index_level.segment(static_cast<Eigen::Index>(first), n);
    return out;
}

std::vector<double> PricePanel::market_caps_at(std::size_t row) const {
    const auto ref = static_cast<Eigen::Index>(dates.size() - 1);
    std::vector<double> caps(assets.size());
    for (std::size_t j = 0; j < assets.size(); ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        caps[j] = assets[j].market_cap * prices(static_cast<Eigen::Index>(row), c) / prices(ref, c);
    }
    return caps;
}

PricePanel load_price_panel(const std::filesystem::path& prices,
                            const std::filesystem::path& market_caps, const CsvSchema& schema) {
    const auto lines = csv::read_lines(prices);
    if (lines.empty()) throw ParseError(1, "empty price file " + prices.string());
    const auto header = csv::split_line(lines[0]);
    const auto date_col = column_of(header, schema.date_column, prices.string());
    const auto index_col = column_of(header, schema.index_column, prices.string());

    std::vector<std::size_t> asset_cols;
    PricePanel panel;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == date_col || c == index_col) continue;
        asset_cols.push_back(c);
        panel.assets.push_back(Asset{header[c], 0.0});
    }
    if (asset_cols.empty()) throw ParseError(1, "no asset columns in " + prices.string());

    std::optional<std::vector<std::string>> mc_row;
    std::vector<std::vector<double>> rows;
    std::vector<double> levels;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty() || lines[i] == "\r") continue;
        auto fields = csv::split_line(lines[i]);
        if (fields.size() != header.size()) {
            throw ParseError(line_no, fmt::format("expected {} fields, found {}", header.size(),
                                                  fields.size()));
        }
        if (market_caps.empty() && fields[date_col] == schema.mc_row_label) {
            mc_row = std::move(fields);
            continue;
        }
        Date date;
        try {
            date = parse_iso_date(fields[date_col]);
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
        std::vector<std::string> missing;
        if (is_missing(fields[index_col])) missing.push_back(schema.index_column);
        for (std::size_t j = 0; j < asset_cols.size(); ++j) {
            if (is_missing(fields[asset_cols[j]])) missing.push_back(panel.assets[j].id);
        }
        if (!missing.empty()) {
            std::string names;
            for (const auto& m : missing) names += (names.empty() ? "" : " ") + m;
            panel.load_log.push_back(fmt::format("dropped {} (line {}): missing {}",
                                                 format_date(date), line_no, names));
            continue;
        }
        std::vector<double> row(asset_cols.size());
        for (std::size_t j = 0; j < asset_cols.size(); ++j) {
            const auto& cell = fields[asset_cols[j]];
            if (!csv::parse_double(cell, row[j])) {
                throw ParseError(line_no, "invalid price '" + cell + "' for asset '" +
                                              panel.assets[j].id + "'");
            }
            if (!(row[j] > 0.0)) {
                throw ValidationError(fmt::format("non-positive price {} for asset '{}' on {}",
                                                  cell, panel.assets[j].id, format_date(date)));
            }
        }
        double level = 0.0;
        if (!csv::parse_double(fields[index_col], level)) {
            throw ParseError(line_no, "invalid index level '" + fields[index_col] + "'");
        }
        if (!(level > 0.0)) {
            throw ValidationError("non-positive index level on " + format_date(date));
        }
        panel.dates.push_back(date);
        rows.push_back(std::move(row));
        levels.push_back(level);
    }

    if (rows.size() < 2) {
        throw InsufficientDataError(fmt::format("price panel has {} usable rows, need at least 2",
                                                rows.size()));
    }

    panel.prices.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(asset_cols.size()));
    panel.index_level.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const auto r = static_cast<Eigen::Index>(t);
        panel.index_level(r) = levels[t];
        for (std::size_t j = 0; j < asset_cols.size(); ++j) {
            panel.prices(r, static_cast<Eigen::Index>(j)) = rows[t][j];
        }
    }

    if (!market_caps.empty()) {
        const auto caps = load_market_caps(market_caps, schema);
        for (auto& a : panel.assets) {
            auto it = caps.find(a.id);
            if (it == caps.end()) {
                throw ValidationError("no market cap for asset '" + a.id + "' in " +
                                      market_caps.string());
            }
            a.market_cap = it->second;
        }
    } else if (mc_row) {
        for (std::size_t j = 0; j < asset_cols.size(); ++j) {
            if (!csv::parse_double((*mc_row)[asset_cols[j]], panel.assets[j].market_cap)) {
                throw ValidationError("invalid market cap for asset '" + panel.assets[j].id + "'");
            }
        }
    } else {
        throw ValidationError("no market-cap file given and no '" + schema.mc_row_label +
                              "' row in " + prices.string());
    }

    panel.validate();
    return panel;
}

ReturnPanel ReturnPanel::select_columns(std::span<const std::size_t> columns) const {
    ReturnPanel out;
    out.periods = periods;
    out.frequency = frequency;
    out.index_returns = index_returns;
    out.returns.resize(returns.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.returns.col(static_cast<Eigen::Index>(j)) =
            returns.col(static_cast<Eigen::Index>(columns[j]));
        out.asset_ids.push_back(asset_ids.at(columns[j]));
    }
    return out;
}

ReturnPanel ReturnPanel::tail(std::size_t count) const {
    if (count > periods.size()) {
        throw InsufficientDataError(
            fmt::format("requested {} periods, only {} available", count, periods.size()));
    }
    const auto first = periods.size() - count;
    const auto n = static_cast<Eigen::Index>(count);
    ReturnPanel out;
    out.periods.assign(periods.begin() + static_cast<std::ptrdiff_t>(first), periods.end());
    out.asset_ids = asset_ids;
    out.returns = returns.bottomRows(n);
    out.index_returns = index_returns.tail(n);
    out.frequency = frequency;
    return out;
}

std::vector<std::size_t> sample_rows(const std::vector<Date>& dates, Frequency frequency) {
    std::vector<std::size_t> rows;
    if (frequency == Frequency::daily) {
        rows.resize(dates.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        return rows;
    }
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (t + 1 == dates.size() || iso_week_key(dates[t + 1]) != iso_week_key(dates[t])) {
            rows.push_back(t);
        }
    }
    return rows;
}

ReturnPanel compute_log_returns(const PricePanel& panel, Frequency frequency) {
    const auto rows = sample_rows(panel.dates, frequency);
    if (rows.size() < 2) {
        throw InsufficientDataError(fmt::format(
            "need at least 2 {} samples to form a return, found {}",
            frequency == Frequency::weekly ? "weekly" : "daily", rows.size()));
    }
    ReturnPanel out;
    out.frequency = frequency;
    for (const auto& a : panel.assets) out.asset_ids.push_back(a.id);
    const auto n = static_cast<Eigen::Index>(rows.size() - 1);
    out.returns.resize(n, panel.prices.cols());
    out.index_returns.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto a = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k)]);
        const auto b = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(k) + 1]);
        out.periods.push_back(panel.dates[static_cast<std::size_t>(b)]);
        for (Eigen::Index j = 0; j < panel.prices.cols(); ++j) {
            out.returns(k, j) = std::log(panel.prices(b, j) / panel.prices(a, j));
        }
        out.index_returns(k) = std::log(panel.index_level(b) / panel.index_level(a));
    }
    return out;
}

ReturnPanel compute_simple_returns(const PricePanel& panel) {
    if (panel.periods() < 2) throw InsufficientDataError("need at least 2 rows for daily returns");
    ReturnPanel out;
    out.frequency = Frequency::daily;
    for (const auto& a : panel.assets) out.asset_ids.push_back(a.id);
    const auto n = static_cast<Eigen::Index>(panel.periods() - 1);
    out.returns.resize(n, panel.prices.cols());
    out.index_returns.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        out.periods.push_back(panel.dates[static_cast<std::size_t>(t) + 1]);
        for (Eigen::Index j = 0; j < panel.prices.cols(); ++j) {
            out.returns(t, j) = panel.prices(t + 1, j) / panel.prices(t, j) - 1.0;
        }
        out.index_returns(t) = panel.index_level(t + 1) / panel.index_level(t) - 1.0;
    }
    return out;
}

CorrelationMatrix estimate_correlation(const ReturnPanel& returns,
                                       const CorrelationSettings& settings) {
    const std::size_t window = settings.lookback;
    if (window < 3) throw ParameterError("correlation lookback must be at least 3");
    if (!(settings.shrinkage >= 0.0 && settings.shrinkage <= 1.0)) {
        throw ParameterError("shrinkage intensity must lie in [0, 1]");
    }
    if (returns.size() < window) {
        throw InsufficientDataError(fmt::format("lookback of {} periods exceeds the {} available",
                                                window, returns.size()));
    }
    const auto assets = returns.returns.cols();
    const auto n = static_cast<Eigen::Index>(window);
    const Eigen::MatrixXd x = returns.returns.bottomRows(n);

    // Period n of the window (1 = oldest) gets weight n / sum(n).
    Eigen::VectorXd w(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        w(t) = settings.linear_weights ? static_cast<double>(t + 1) : 1.0;
    }
    w /= w.sum();

    const Eigen::RowVectorXd mean = w.transpose() * x;
    Eigen::MatrixXd centered = x.rowwise() - mean;
    centered = w.array().sqrt().matrix().asDiagonal() * centered;
    const Eigen::MatrixXd cov = centered.transpose() * centered;

    for (Eigen::Index j = 0; j < assets; ++j) {
        const double scale = std::max(1.0, std::abs(mean(j)));
        if (!(std::sqrt(cov(j, j)) > 1e-14 * scale)) {
            throw DegenerateAssetError("asset '" + returns.asset_ids.at(static_cast<std::size_t>(j)) +
                                       "' has zero weighted variance over the lookback window");
        }
    }

    const Eigen::VectorXd inv_sd = cov.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd sample = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();

    double target = 0.0;
    if (assets > 1) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < assets; ++i) {
            for (Eigen::Index j = 0; j < assets; ++j) {
                if (i != j) sum += sample(i, j);
            }
        }
        target = sum / static_cast<double>(assets * (assets - 1));
    }

    const double lambda = settings.shrinkage;
    Eigen::MatrixXd rho(assets, assets);
    for (Eigen::Index i = 0; i < assets; ++i) {
        for (Eigen::Index j = 0; j < assets; ++j) {
            rho(i, j) = i == j ? 1.0 : (1.0 - lambda) * sample(i, j) + lambda * target;
        }
    }
    rho = (0.5 * (rho + rho.transpose())).eval().cwiseMax(-1.0).cwiseMin(1.0);
    rho.diagonal().setOnes();

    CorrelationMatrix out;
    out.asset_ids = returns.asset_ids;
    out.meta.shrinkage = lambda;
    out.meta.linear_weights = settings.linear_weights;
    out.meta.lookback = window;
    out.meta.target_correlation = target;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rho);
    out.meta.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (out.meta.min_eigenvalue < -1e-8) {
        const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
        Eigen::MatrixXd repaired =
            eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::VectorXd inv = repaired.diagonal().array().sqrt().inverse();
        repaired = inv.asDiagonal() * repaired * inv.asDiagonal();
        rho = (0.5 * (repaired + repaired.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
        rho.diagonal().setOnes();
        out.meta.psd_repaired = true;
    }
    out.rho = std::move(rho);
    return out;
}

std::vector<std::string> mc_ranking(std::span<const std::string> ids, std::span<const double> caps) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (caps[a] != caps[b]) return caps[a] > caps[b];
        return ids[a] < ids[b];
    });
    std::vector<std::string> ranked;
    ranked.reserve(ids.size());
    for (auto i : order) ranked.push_back(ids[i]);
    return ranked;
}

std::vector<std::string> mc_ranking(std::span<const Asset> assets) {
    std::vector<std::string> ids;
    std::vector<double> caps;
    for (const auto& a : assets) {
        ids.push_back(a.id);
        caps.push_back(a.market_cap);
    }
    return mc_ranking(ids, caps);
}

double correlation_distance(double rho) { return std::sqrt(2.0 * (1.0 - rho)); }

DistanceMatrix correlation_to_distance(const CorrelationMatrix& rho,
                                       std::span<const std::string> mc_ranking) {
    const auto k = rho.asset_ids.size();
    if (static_cast<std::size_t>(rho.rho.rows()) != k || static_cast<std::size_t>(rho.rho.cols()) != k) {
        throw ValidationError("correlation matrix shape does not match its asset list");
    }
    if (mc_ranking.size() != k) {
        throw ValidationError("market-cap ranking is not a permutation of the correlation assets");
    }
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < k; ++i) position.emplace(rho.asset_ids[i], i);
    std::vector<Eigen::Index> source(k);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < k; ++i) {
        auto it = position.find(mc_ranking[i]);
        if (it == position.end() || !seen.insert(mc_ranking[i]).second) {
            throw ValidationError("market-cap ranking is not a permutation of the correlation assets");
        }
        source[i] = static_cast<Eigen::Index>(it->second);
    }

    DistanceMatrix out;
    out.mc_rank_order.assign(mc_ranking.begin(), mc_ranking.end());
    const auto n = static_cast<Eigen::Index>(k);
    out.d.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            double r = rho.rho(source[static_cast<std::size_t>(i)], source[static_cast<std::size_t>(j)]);
            if (!(r >= -1.0 - 1e-12 && r <= 1.0 + 1e-12)) {
                throw ValidationError(fmt::format("correlation {} between '{}' and '{}' is outside [-1, 1]",
                                                  r, mc_ranking[static_cast<std::size_t>(i)],
                                                  mc_ranking[static_cast<std::size_t>(j)]));
            }
            r = std::clamp(r, -1.0, 1.0);
            out.d(i, j) = i == j ? 0.0 : correlation_distance(r);
        }
    }
    out.d = (0.5 * (out.d + out.d.transpose())).eval();
    return out;
}

std::string distance_csv(const DistanceMatrix& d) {
    std::string text;
    for (const auto& id : d.mc_rank_order) text += "," + id;
    text += "\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        text += d.mc_rank_order[i];
        for (std::size_t j = 0; j < d.size(); ++j) {
            text += "," + csv::format_double(d.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        text += "\n";
    }
    return text;
}

void write_distance_csv(const DistanceMatrix& d, const std::filesystem::path& path) {
    csv::write_file_atomic(path, distance_csv(d));
}

DistanceMatrix read_distance_csv(const std::filesystem::path& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw ParseError(1, "empty distance file " + path.string());
    auto header = csv::split_line(lines[0]);
    DistanceMatrix out;
    out.mc_rank_order.assign(header.begin() + 1, header.end());
    const auto k = static_cast<Eigen::Index>(out.mc_rank_order.size());
    out.d.resize(k, k);
    Eigen::Index row = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = csv::split_line(lines[i]);
        if (row >= k || fields.size() != header.size()) {
            throw ParseError(i + 1, "distance matrix row has the wrong shape");
        }
        for (Eigen::Index j = 0; j < k; ++j) {
            if (!csv::parse_double(fields[static_cast<std::size_t>(j) + 1], out.d(row, j))) {
                throw ParseError(i + 1, "invalid distance '" + fields[static_cast<std::size_t>(j) + 1] + "'");
            }
        }
        ++row;
    }
    if (row != k) throw ParseError(lines.size(), "distance matrix has too few rows");
    return out;
}

}  // namespace sit
