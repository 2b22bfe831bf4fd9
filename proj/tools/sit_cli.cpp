#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sit/backtest.hpp"
#include "sit/config.hpp"
#include "sit/csv.hpp"
#include "sit/errors.hpp"
#include "sit/report.hpp"
#include "sit/selection.hpp"
#include "sit/solver.hpp"
#include "sit/synth.hpp"
#include "sit/weighting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> sweeps;
    std::optional<double> cooling;
    std::optional<std::string> out;
    std::vector<std::string> presets;
};

void add_solver_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Solver seed (synth: generator seed)");
    cmd->add_option("--restarts", o.restarts, "Independent annealing restarts");
    cmd->add_option("--sweeps", o.sweeps, "Temperature steps per restart");
    cmd->add_option("--cooling", o.cooling, "Geometric cooling ratio in (0, 1)");
}

sit::RunConfig load_config(const Overrides& o, bool seed_is_synth) {
    const fs::path path(o.config);
    json doc = sit::read_config_document(path);
    if (!doc.is_object()) throw sit::ConfigError("config: expected a JSON object");
    if (o.seed) doc[seed_is_synth ? "synth" : "solver"]["seed"] = *o.seed;
    if (o.restarts) doc["solver"]["restarts"] = *o.restarts;
    if (o.sweeps) doc["solver"]["sweeps"] = *o.sweeps;
    if (o.cooling) doc["solver"]["cooling"] = *o.cooling;
    if (o.out) doc["output_dir"] = fs::absolute(*o.out).string();
    if (!o.presets.empty()) {
        doc["presets"] = o.presets;
        doc.erase("stages");
    }
    return sit::parse_run_config(doc, path.parent_path());
}

void write_manifest(const sit::RunConfig& config, const fs::path& dir, std::string_view command) {
    sit::csv::write_file_atomic(dir / "manifest.txt", sit::run_manifest(config, command));
}

sit::PricePanel load_panel(const sit::RunConfig& config) {
    if (config.prices.empty()) throw sit::ConfigError("data.prices: required");
    auto panel = sit::load_price_panel(config.prices, config.market_caps, config.schema);
    for (const auto& line : panel.load_log) std::fprintf(stderr, "warning: %s\n", line.c_str());
    return panel;
}

void require_plans(const sit::RunConfig& config) {
    if (config.plans.empty()) throw sit::ConfigError("config: no presets or stages configured");
}

int cmd_synth(const Overrides& o) {
    const auto config = load_config(o, true);
    const auto market = sit::generate_market(config.synth);
    const auto prices = config.prices.empty() ? config.output_dir / "prices.csv" : config.prices;
    const auto caps = config.market_caps.empty() ? config.output_dir / "market_caps.csv" : config.market_caps;
    sit::write_market(market.panel, prices, caps, config.schema);
    write_manifest(config, config.output_dir, "synth");
    std::printf("wrote %s and %s\n", prices.string().c_str(), caps.string().c_str());
    return 0;
}

std::string selection_csv(const sit::DistanceMatrix& d, const sit::SelectedSet& set) {
    std::string out = "asset,mc_rank,stages\n";
    for (std::size_t i = 0; i < set.indices.size(); ++i) {
        std::string stages;
        for (auto s : set.provenance[i]) stages += (stages.empty() ? "" : ";") + std::to_string(s);
        out += fmt::format("{},{},{}\n", d.mc_rank_order[set.indices[i]], set.indices[i] + 1, stages);
    }
    return out;
}

int cmd_select(const Overrides& o) {
    const auto config = load_config(o, false);
    require_plans(config);
    const auto panel = load_panel(config);
    const auto row = panel.periods() - 1;
    const auto as_of = panel.dates[row];
    const auto distances = sit::universe_distances(panel, row, config.k, config.backtest.correlation);
    const auto daily = sit::compute_simple_returns(panel);

    for (const auto& plan : config.plans) {
        try {
            const auto results = sit::solve_stages(plan, distances, [&](const sit::SelectionProblem& p) {
                return sit::solve(p, config.solver);
            });
            std::vector<sit::SelectedSet> sets;
            std::string report = fmt::format("plan {}\nas_of {}\n", plan.name, sit::format_date(as_of));
            for (std::size_t s = 0; s < results.size(); ++s) {
                sets.push_back(sit::to_selected_set(results[s].selection, s + 1));
                const auto& p = plan.stages[s];
                const auto problem = sit::build_problem(distances, p);
                report += fmt::format("\nstage {} K={} H={} N={} M={} alpha={} beta={}\n", s + 1, p.k, p.h,
                                      p.n, p.m, sit::csv::format_double(p.alpha),
                                      sit::csv::format_double(p.beta));
                report += sit::format_solve_report(problem, results[s]);
            }
            const auto selected = sit::union_and_truncate(sets, plan.m_star);

            const auto dir = config.output_dir / plan.name;
            sit::csv::write_file_atomic(dir / "selection.csv", selection_csv(distances, selected));
            sit::csv::write_file_atomic(dir / "selection_report.txt", report);

            std::vector<std::string> ids;
            for (auto i : selected.indices) ids.push_back(distances.mc_rank_order[i]);
            const auto window = config.backtest.weight_window;
            if (daily.size() >= window) {
                const auto portfolio = sit::optimize_weights(ids, daily.tail(window), as_of);
                sit::write_portfolio_csv(portfolio, dir / "portfolio.csv");
            } else {
                std::fprintf(stderr, "warning: %s: %zu daily returns, weight fit needs %zu; no portfolio.csv\n",
                             plan.name.c_str(), daily.size(), window);
            }
            std::printf("%s: %zu assets -> %s\n", plan.name.c_str(), ids.size(), dir.string().c_str());
        } catch (const sit::Error& e) {
            throw sit::Error(plan.name + ": " + e.what());
        }
    }
    write_manifest(config, config.output_dir, "select");
    return 0;
}

int cmd_backtest(const Overrides& o) {
    const auto config = load_config(o, false);
    require_plans(config);
    const auto panel = load_panel(config);
    std::vector<sit::BacktestReport> reports;
    for (const auto& plan : config.plans) {
        try {
            auto report = sit::run_backtest(plan, panel, config.solver, config.backtest);
            sit::write_backtest_report(report, config.output_dir / plan.name);
            std::printf("%s: %zu rebalances, max |residual| %s\n", plan.name.c_str(), report.rebalances.size(),
                        sit::csv::format_double(report.max_abs_residual).c_str());
            reports.push_back(std::move(report));
        } catch (const sit::Error& e) {
            throw sit::Error(plan.name + ": " + e.what());
        }
    }
    if (reports.size() >= 2) sit::write_comparison(reports, config.output_dir / "comparison");
    write_manifest(config, config.output_dir, "backtest");
    return 0;
}

int cmd_solve(const Overrides& o, const std::string& instance, bool exact) {
    sit::SaConfig cfg;
    if (!o.config.empty()) cfg = load_config(o, false).solver;
    if (o.seed) cfg.rng_seed = *o.seed;
    if (o.restarts) cfg.restarts = *o.restarts;
    if (o.sweeps) cfg.sweeps = *o.sweeps;
    if (o.cooling) cfg.cooling_ratio = *o.cooling;
    const auto problem = sit::read_instance(fs::path(instance));
    const auto result = exact ? sit::solve_exact(problem) : sit::solve(problem, cfg);
    const auto text = sit::format_solve_report(problem, result);
    if (o.out) {
        sit::csv::write_file_atomic(*o.out, text);
    } else {
        std::fputs(text.c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse index tracking: asset selection, weighting and backtests"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("sit ") + std::string(sit::kVersion));

    Overrides o;
    std::string instance;
    bool exact = false;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic factor-model market");
    synth->add_option("-c,--config", o.config, "JSON config file")->required();
    synth->add_option("--seed", o.seed, "Generator seed");
    synth->add_option("-o,--out", o.out, "Output directory");

    auto* select = app.add_subcommand("select", "Select assets at the last panel date");
    auto* backtest = app.add_subcommand("backtest", "Backtest every configured plan");
    for (auto* cmd : {select, backtest}) {
        cmd->add_option("-c,--config", o.config, "JSON config file")->required();
        cmd->add_option("-o,--out", o.out, "Output directory");
        cmd->add_option("--preset", o.presets, "Preset E1..E6 (repeatable); replaces the configured plans");
        add_solver_flags(cmd, o);
    }

    auto* solve = app.add_subcommand("solve", "Solve a single selection instance file");
    solve->add_option("-i,--instance", instance, "Instance file")->required();
    solve->add_flag("--exact", exact, "Exhaustive enumeration instead of annealing");
    solve->add_option("-c,--config", o.config, "JSON config file for solver settings");
    solve->add_option("-o,--out", o.out, "Report file (default stdout)");
    add_solver_flags(solve, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) return cmd_synth(o);
        if (*select) return cmd_select(o);
        if (*backtest) return cmd_backtest(o);
        if (*solve) return cmd_solve(o, instance, exact);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
