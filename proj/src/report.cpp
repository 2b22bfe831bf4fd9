#include "sit/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"

namespace sit {

namespace {

std::string num(double v) { return csv::format_double(v); }

std::string join_stages(const std::vector<std::size_t>& stages) {
    std::string s;
    for (auto st : stages) s += (s.empty() ? "" : ";") + std::to_string(st);
    return s;
}

}  // namespace

std::string format_backtest_summary(const BacktestReport& report) {
    std::string out = fmt::format("portfolio {}\n", report.label.empty() ? "-" : report.label);
    out += fmt::format("evaluation_days {}\n", report.index_returns.size());
    if (!report.dates.empty()) {
        out += fmt::format("period {} {}\n", format_date(report.dates.front()),
                           format_date(report.dates.back()));
    }
    out += fmt::format("rebalances {}\n", report.rebalances.size());
    for (const auto& h : report.horizons) {
        out += fmt::format("horizon {}: ", h.horizon);
        if (h.residuals.values.empty()) {
            out += "n/a (" + h.note + ")\n";
            continue;
        }
        out += fmt::format("n={} mean={} variance={}", h.residuals.values.size(), num(h.mean),
                           num(h.variance));
        if (h.wilcoxon) {
            out += fmt::format(" wilcoxon W={} p={} {}", num(h.wilcoxon->statistic),
                               num(h.wilcoxon->p_value),
                               h.wilcoxon->rejected_at_5pct ? "rejected" : "not-rejected");
        } else {
            out += " wilcoxon n/a (" + h.note + ")";
        }
        out += "\n";
    }
    for (const auto& h : report.long_horizons) {
        out += fmt::format("long_horizon {}: ", h.horizon);
        if (h.residuals.values.empty()) {
            out += "n/a (" + h.note + ")\n";
        } else {
            out += fmt::format("n={} mean_abs={} variance_abs={}\n", h.residuals.values.size(),
                               num(h.mean_abs), num(h.variance_abs));
        }
    }
    out += fmt::format("max_abs_residual_curve {}\n", num(report.max_abs_residual));
    return out;
}

void write_backtest_report(const BacktestReport& report, const std::filesystem::path& dir) {
    std::string stats = "horizon,n,mean,variance,wilcoxon_w,wilcoxon_p,wilcoxon_rejected\n";
    for (const auto& h : report.horizons) {
        if (h.residuals.values.empty()) {
            stats += fmt::format("{},0,,,,,\n", h.horizon);
            continue;
        }
        stats += fmt::format("{},{},{},{},", h.horizon, h.residuals.values.size(), num(h.mean),
                             num(h.variance));
        if (h.wilcoxon) {
            stats += fmt::format("{},{},{}\n", num(h.wilcoxon->statistic), num(h.wilcoxon->p_value),
                                 h.wilcoxon->rejected_at_5pct ? 1 : 0);
        } else {
            stats += ",,\n";
        }
    }
    csv::write_file_atomic(dir / "residual_stats.csv", stats);

    std::string long_h = "horizon_days,n,mean_abs,variance_abs\n";
    for (const auto& h : report.long_horizons) {
        if (h.residuals.values.empty()) {
            long_h += fmt::format("{},0,,\n", h.horizon);
        } else {
            long_h += fmt::format("{},{},{},{}\n", h.horizon, h.residuals.values.size(), num(h.mean_abs),
                                  num(h.variance_abs));
        }
    }
    csv::write_file_atomic(dir / "long_horizon.csv", long_h);

    std::string curve = "p,residual\n";
    for (std::size_t p = 0; p < report.residual_curve.size(); ++p) {
        curve += fmt::format("{},{}\n", p + 1, num(report.residual_curve[p]));
    }
    csv::write_file_atomic(dir / "residual_curve.csv", curve);

    std::string residuals = "horizon,t,residual\n";
    auto dump = [&](const ResidualSeries& s) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            residuals += fmt::format("{},{},{}\n", s.horizon, s.sample_times[i] + 1, num(s.values[i]));
        }
    };
    for (const auto& h : report.horizons) dump(h.residuals);
    for (const auto& h : report.long_horizons) dump(h.residuals);
    csv::write_file_atomic(dir / "residuals.csv", residuals);

    std::string returns = "date,index_return,portfolio_return\n";
    for (std::size_t t = 0; t < report.index_returns.size(); ++t) {
        returns += fmt::format("{},{},{}\n", format_date(report.dates[t]), num(report.index_returns[t]),
                               num(report.portfolio_returns[t]));
    }
    csv::write_file_atomic(dir / "returns.csv", returns);

    std::string holdings = "as_of,asset,weight,stages\n";
    for (const auto& r : report.rebalances) {
        for (std::size_t i = 0; i < r.portfolio.holdings.size(); ++i) {
            const auto& [id, w] = r.portfolio.holdings[i];
            const auto stages = i < r.provenance.size() ? join_stages(r.provenance[i]) : "";
            holdings += fmt::format("{},{},{},{}\n", format_date(r.date), id, num(w), stages);
        }
    }
    csv::write_file_atomic(dir / "holdings.csv", holdings);

    std::string summary = format_backtest_summary(report);
    for (const auto& r : report.rebalances) {
        for (const auto& w : r.portfolio.warnings) {
            summary += fmt::format("warning {} {}\n", format_date(r.date), w);
        }
    }
    csv::write_file_atomic(dir / "summary.txt", summary);
}

std::vector<LeveneComparison> compare_variances(const std::vector<BacktestReport>& reports) {
    std::vector<LeveneComparison> out;
    if (reports.empty()) return out;
    for (std::size_t hi = 0; hi < reports.front().horizons.size(); ++hi) {
        LeveneComparison cmp;
        cmp.horizon = reports.front().horizons[hi].horizon;
        std::vector<std::vector<double>> groups;
        for (const auto& r : reports) {
            if (hi >= r.horizons.size()) continue;
            const auto& h = r.horizons[hi];
            if (h.wilcoxon && !h.wilcoxon->rejected_at_5pct) {
                cmp.included.push_back(r.label);
                groups.push_back(h.residuals.values);
            }
        }
        try {
            cmp.result = levene_test(groups);
        } catch (const InsufficientSampleError& e) {
            cmp.note = e.what();
        }
        out.push_back(std::move(cmp));
    }
    return out;
}

void write_comparison(const std::vector<BacktestReport>& reports, const std::filesystem::path& dir) {
    std::string header = "horizon";
    for (const auto& r : reports) header += "," + r.label;
    header += "\n";

    std::string means = header;
    std::string variances = header;
    if (!reports.empty()) {
        for (std::size_t hi = 0; hi < reports.front().horizons.size(); ++hi) {
            means += std::to_string(reports.front().horizons[hi].horizon);
            variances += std::to_string(reports.front().horizons[hi].horizon);
            for (const auto& r : reports) {
                const auto& h = r.horizons.at(hi);
                const bool have = !h.residuals.values.empty();
                means += "," + (have ? num(h.mean) : std::string{});
                variances += "," + (have ? num(h.variance) : std::string{});
            }
            means += "\n";
            variances += "\n";
        }
    }
    csv::write_file_atomic(dir / "table_mean.csv", means);
    csv::write_file_atomic(dir / "table_variance.csv", variances);

    std::string abs_means = header;
    std::string abs_vars = header;
    if (!reports.empty()) {
        for (std::size_t hi = 0; hi < reports.front().long_horizons.size(); ++hi) {
            abs_means += std::to_string(reports.front().long_horizons[hi].horizon);
            abs_vars += std::to_string(reports.front().long_horizons[hi].horizon);
            for (const auto& r : reports) {
                const auto& h = r.long_horizons.at(hi);
                const bool have = !h.residuals.values.empty();
                abs_means += "," + (have ? num(h.mean_abs) : std::string{});
                abs_vars += "," + (have ? num(h.variance_abs) : std::string{});
            }
            abs_means += "\n";
            abs_vars += "\n";
        }
    }
    csv::write_file_atomic(dir / "table_abs_mean.csv", abs_means);
    csv::write_file_atomic(dir / "table_abs_variance.csv", abs_vars);

    std::string max_abs = "portfolio,max_abs_residual\n";
    for (const auto& r : reports) max_abs += fmt::format("{},{}\n", r.label, num(r.max_abs_residual));
    csv::write_file_atomic(dir / "max_abs_residual.csv", max_abs);

    std::string levene = "horizon,included,statistic,p_value,rejected\n";
    for (const auto& c : compare_variances(reports)) {
        std::string included;
        for (const auto& l : c.included) included += (included.empty() ? "" : ";") + l;
        if (c.result) {
            levene += fmt::format("{},{},{},{},{}\n", c.horizon, included, num(c.result->statistic),
                                  num(c.result->p_value), c.result->rejected_at_5pct ? 1 : 0);
        } else {
            levene += fmt::format("{},{},,,\n", c.horizon, included);
        }
    }
    csv::write_file_atomic(dir / "levene.csv", levene);
}

}  // namespace sit
