#include "sit/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "sit/errors.hpp"
#include "sit/rng.hpp"

namespace sit {

std::vector<std::size_t> quarter_end_rows(const std::vector<Date>& dates) {
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const auto month = static_cast<unsigned>(dates[t].month());
        if (month % 3 != 0) continue;
        if (t + 1 == dates.size() || dates[t + 1].month() != dates[t].month() ||
            dates[t + 1].year() != dates[t].year()) {
            rows.push_back(t);
        }
    }
    return rows;
}

DistanceMatrix universe_distances(const PricePanel& panel, std::size_t row, std::size_t k,
                                  const CorrelationSettings& settings) {
    if (row >= panel.periods()) throw RangeError(fmt::format("row {} outside the panel", row));
    if (k < 1 || k > panel.asset_count()) {
        throw ParameterError(fmt::format("universe size K={} must lie in [1, {}]", k, panel.asset_count()));
    }
    const auto caps = panel.market_caps_at(row);
    std::vector<std::string> ids;
    for (const auto& a : panel.assets) ids.push_back(a.id);
    const auto ranking = mc_ranking(ids, caps);
    std::vector<std::string> universe(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
    std::unordered_map<std::string, std::size_t> column;
    for (std::size_t j = 0; j < ids.size(); ++j) column.emplace(ids[j], j);
    std::vector<std::size_t> cols;
    for (const auto& id : universe) cols.push_back(column.at(id));
    const auto weekly =
        compute_log_returns(panel.slice_rows(0, row + 1), Frequency::weekly).select_columns(cols);
    return correlation_to_distance(estimate_correlation(weekly, settings), universe);
}

std::vector<double> portfolio_daily_returns(const PricePanel& panel,
                                            const std::vector<RebalanceRecord>& rebalances) {
    if (rebalances.empty()) return {};
    std::unordered_map<std::string, Eigen::Index> column;
    for (std::size_t j = 0; j < panel.assets.size(); ++j) {
        column.emplace(panel.assets[j].id, static_cast<Eigen::Index>(j));
    }
    const auto rows = panel.periods();
    std::vector<double> out;
    for (std::size_t r = 0; r < rebalances.size(); ++r) {
        const auto start = rebalances[r].row;
        const auto stop = r + 1 < rebalances.size() ? rebalances[r + 1].row : rows - 1;
        std::vector<std::pair<Eigen::Index, double>> held;
        for (const auto& [id, w] : rebalances[r].portfolio.holdings) {
            auto it = column.find(id);
            if (it == column.end()) throw ValidationError("holding '" + id + "' is not in the panel");
            held.emplace_back(it->second, w);
        }
        // Value relative to the rebalance close; V_start = 1.
        double previous = 1.0;
        const auto base = static_cast<Eigen::Index>(start);
        for (std::size_t t = start + 1; t <= stop; ++t) {
            double value = 0.0;
            for (const auto& [c, w] : held) {
                value += w * panel.prices(static_cast<Eigen::Index>(t), c) / panel.prices(base, c);
            }
            out.push_back(value / previous - 1.0);
            previous = value;
        }
    }
    return out;
}

Selector plan_selector(const StagePlan& plan, const SaConfig& cfg) {
    plan.validate();
    return [plan, cfg](const SelectionContext& ctx) {
        const auto results = solve_stages(plan, ctx.distances,
                                          [&cfg](const SelectionProblem& p) { return solve(p, cfg); });
        std::vector<SelectedSet> sets;
        RebalanceChoice choice;
        for (std::size_t i = 0; i < results.size(); ++i) {
            sets.push_back(to_selected_set(results[i].selection, i + 1));
            choice.stage_objectives.push_back(results[i].objective);
        }
        choice.selected = union_and_truncate(sets, plan.m_star);
        return choice;
    };
}

Selector random_selector(std::size_t count, std::size_t h, std::uint64_t seed) {
    if (count < 1 || count > h) throw ParameterError("random selection needs 1 <= count <= H");
    return [count, h, seed](const SelectionContext& ctx) {
        if (ctx.distances.size() < h) throw ParameterError("universe smaller than H");
        Rng rng(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (ctx.rebalance_number + 1)));
        std::vector<std::size_t> pool(h);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.below(h - i)]);
        pool.resize(count);
        std::sort(pool.begin(), pool.end());
        RebalanceChoice choice;
        choice.selected.indices = pool;
        choice.selected.provenance.assign(count, {1});
        return choice;
    };
}

namespace {

std::vector<std::size_t> rebalance_candidates(const PricePanel& panel, const BacktestSettings& s) {
    auto rows = s.rebalance_rows.empty() ? quarter_end_rows(panel.dates) : s.rebalance_rows;
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

}  // namespace

BacktestReport run_backtest(const Selector& selector, std::size_t universe_size,
                            const PricePanel& panel, const BacktestSettings& settings,
                            std::string label) {
    const auto rows = panel.periods();
    if (universe_size < 1 || universe_size > panel.asset_count()) {
        throw ParameterError(fmt::format("universe size K={} must lie in [1, {}]", universe_size,
                                         panel.asset_count()));
    }
    const auto weekly_rows = sample_rows(panel.dates, Frequency::weekly);
    const auto daily = compute_simple_returns(panel);

    // Weekly returns available from a panel cut at `row` (the cut row closes its own week).
    auto weekly_returns_up_to = [&](std::size_t row) {
        const auto before = static_cast<std::size_t>(
            std::lower_bound(weekly_rows.begin(), weekly_rows.end(), row) - weekly_rows.begin());
        return before;  // (before + 1) samples -> before returns
    };

    std::vector<std::size_t> schedule;
    for (auto row : rebalance_candidates(panel, settings)) {
        if (row + 1 >= rows) continue;
        if (!schedule.empty()) {
            schedule.push_back(row);
            continue;
        }
        const bool enough_weeks = weekly_returns_up_to(row) >= settings.correlation.lookback;
        const bool enough_days = row >= settings.weight_window;
        if (enough_weeks && enough_days) schedule.push_back(row);
    }
    if (schedule.empty()) {
        throw RangeError(fmt::format(
            "insufficient history: no rebalance date has {} weekly returns and {} daily returns "
            "with at least one day left to evaluate",
            settings.correlation.lookback, settings.weight_window));
    }

    BacktestReport report;
    report.label = std::move(label);
    for (std::size_t r = 0; r < schedule.size(); ++r) {
        const auto row = schedule[r];
        const auto caps = panel.market_caps_at(row);
        const auto distances = universe_distances(panel, row, universe_size, settings.correlation);
        const auto& universe = distances.mc_rank_order;
        std::unordered_map<std::string, std::size_t> column;
        for (std::size_t j = 0; j < panel.assets.size(); ++j) column.emplace(panel.assets[j].id, j);
        std::vector<std::size_t> universe_cols;
        for (const auto& id : universe) universe_cols.push_back(column.at(id));

        const SelectionContext ctx{distances, r, panel.dates[row]};
        const auto choice = selector(ctx);

        RebalanceRecord record;
        record.row = row;
        record.date = panel.dates[row];
        record.provenance = choice.selected.provenance;
        record.stage_objectives = choice.stage_objectives;
        for (auto i : choice.selected.indices) record.selected.push_back(universe.at(i));
        if (record.selected.empty()) throw ParameterError("selector returned no assets");

        if (settings.weighting == WeightingMode::index_weights) {
            double total = 0.0;
            for (const auto& id : record.selected) total += caps[column.at(id)];
            record.portfolio.as_of = record.date;
            for (const auto& id : record.selected) {
                record.portfolio.holdings.emplace_back(id, caps[column.at(id)] / total);
            }
        } else {
            // Daily simple return i covers rows (i, i + 1]; the window ends at `row`.
            const auto window = daily.select_columns(universe_cols);
            ReturnPanel trailing;
            trailing.frequency = Frequency::daily;
            trailing.asset_ids = window.asset_ids;
            const auto first = static_cast<Eigen::Index>(row - settings.weight_window);
            const auto len = static_cast<Eigen::Index>(settings.weight_window);
            trailing.returns = window.returns.middleRows(first, len);
            trailing.index_returns = window.index_returns.segment(first, len);
            trailing.periods.assign(window.periods.begin() + first, window.periods.begin() + first + len);
            record.portfolio = optimize_weights(record.selected, trailing, record.date);
        }
        report.rebalances.push_back(std::move(record));
    }

    report.portfolio_returns = portfolio_daily_returns(panel, report.rebalances);
    const auto first_eval = schedule.front() + 1;
    for (std::size_t t = first_eval; t < rows; ++t) {
        report.dates.push_back(panel.dates[t]);
        report.index_returns.push_back(daily.index_returns(static_cast<Eigen::Index>(t - 1)));
    }
    compile_statistics(report, settings);
    return report;
}

BacktestReport run_backtest(const StagePlan& plan, const PricePanel& panel, const SaConfig& cfg,
                            const BacktestSettings& settings) {
    plan.validate();
    return run_backtest(plan_selector(plan, cfg), plan.stages.front().k, panel, settings, plan.name);
}

void compile_statistics(BacktestReport& report, const BacktestSettings& settings) {
    report.horizons.clear();
    report.long_horizons.clear();
    const auto& index = report.index_returns;
    const auto& port = report.portfolio_returns;

    for (auto p : settings.horizons) {
        HorizonResult h;
        h.horizon = p;
        try {
            h.residuals = residual_series(index, port, p, settings.sample_size, settings.sampling);
        } catch (const RangeError& e) {
            h.residuals.horizon = p;
            h.note = e.what();
            report.horizons.push_back(std::move(h));
            continue;
        }
        h.mean = mean(h.residuals.values);
        h.variance = sample_variance(h.residuals.values);
        try {
            h.wilcoxon = wilcoxon_signed_rank(h.residuals.values);
        } catch (const InsufficientSampleError& e) {
            h.note = e.what();
        }
        report.horizons.push_back(std::move(h));
    }

    for (auto p : settings.long_horizons) {
        LongHorizonResult h;
        h.horizon = p;
        try {
            h.residuals = residual_series_all(index, port, p);
        } catch (const RangeError& e) {
            h.residuals.horizon = p;
            h.note = e.what();
            report.long_horizons.push_back(std::move(h));
            continue;
        }
        std::vector<double> magnitude;
        for (double v : h.residuals.values) magnitude.push_back(std::abs(v));
        h.mean_abs = mean(magnitude);
        h.variance_abs = sample_variance(magnitude);
        report.long_horizons.push_back(std::move(h));
    }

    report.residual_curve = residual_curve(index, port);
    report.max_abs_residual = 0.0;
    for (double v : report.residual_curve) {
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(v));
    }
}

}  // namespace sit
