#include "sit/config.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"
#include "sit/presets.hpp"

namespace sit {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

std::string field_name(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}: wrong type", field_name(where, key)));
    }
}

std::size_t get_count(const json& obj, const std::string& key, std::size_t fallback,
                      const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(fmt::format("{}: expected a non-negative integer", field_name(where, key)));
    }
    return v.get<std::size_t>();
}

std::vector<std::size_t> get_counts(const json& obj, const std::string& key,
                                    std::vector<std::size_t> fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(field_name(where, key) + ": expected an array");
    std::vector<std::size_t> out;
    for (const auto& item : v) {
        if (!item.is_number_integer() || item.get<long long>() < 1) {
            throw ConfigError(field_name(where, key) + ": expected positive integers");
        }
        out.push_back(item.get<std::size_t>());
    }
    return out;
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    if (p.empty()) return {};
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

double resolve_parameter(const json& value, std::size_t m, std::size_t h, const std::string& field) {
    if (value.is_number()) {
        const double v = value.get<double>();
        if (!(v >= 0.0)) throw ConfigError(field + ": must be non-negative");
        return v;
    }
    if (!value.is_string()) throw ConfigError(field + ": expected a number or a form like \"1/M\"");
    std::string text;
    for (char c : value.get<std::string>()) {
        if (c != ' ') text.push_back(c);
    }
    const auto slash = text.find('/');
    double numerator = 0.0;
    if (slash == std::string::npos || slash + 2 != text.size() ||
        !csv::parse_double(text.substr(0, slash), numerator) || numerator < 0.0) {
        throw ConfigError(field + ": cannot parse '" + value.get<std::string>() + "'");
    }
    const char symbol = text.back();
    if (symbol != 'M' && symbol != 'H') {
        throw ConfigError(field + ": denominator must be M or H in '" + value.get<std::string>() + "'");
    }
    const std::size_t denom = symbol == 'M' ? m : h;
    if (denom == 0) throw ConfigError(field + ": " + std::string(1, symbol) + " is zero");
    return numerator / static_cast<double>(denom);
}

void resolve_plans(RunConfig& config) {
    config.plans.clear();
    const auto& doc = config.effective;
    for (const auto& name : config.presets) {
        try {
            config.plans.push_back(preset_plan(name, config.k, config.h));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(fmt::format("preset {}: {}", name, e.what()));
        }
    }
    if (doc.contains("stages")) {
        StagePlan plan;
        plan.name = get_or<std::string>(doc, "name", "custom", "");
        const auto& stages = doc.at("stages");
        if (!stages.is_array() || stages.empty()) throw ConfigError("stages: expected a non-empty array");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            const auto where = fmt::format("stages[{}]", i);
            check_keys(stages[i], {"m", "alpha", "beta"}, where);
            if (!stages[i].contains("m") || !stages[i].contains("alpha") || !stages[i].contains("beta")) {
                throw ConfigError(where + ": m, alpha and beta are required");
            }
            SelectionParams p;
            p.k = config.k;
            p.h = config.h;
            p.n = config.n;
            p.m = get_count(stages[i], "m", 0, where);
            p.alpha = resolve_parameter(stages[i]["alpha"], p.m, p.h, where + ".alpha");
            p.beta = resolve_parameter(stages[i]["beta"], p.m, p.h, where + ".beta");
            plan.stages.push_back(p);
        }
        plan.m_star = get_count(doc, "m_star", plan.stages.front().m, "");
        try {
            plan.validate();
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}: {}", plan.name, e.what()));
        }
        config.plans.push_back(std::move(plan));
    }
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    check_keys(doc,
               {"data", "k", "h", "n", "presets", "name", "stages", "m_star", "estimation", "solver",
                "backtest", "synth", "output_dir"},
               "config");
    RunConfig config;
    config.effective = doc;

    if (doc.contains("data")) {
        const auto& d = doc["data"];
        check_keys(d, {"prices", "market_caps", "date_column", "index_column", "mc_id_column",
                       "mc_value_column", "mc_row_label"},
                   "data");
        config.prices = resolve_path(base_dir, get_or<std::string>(d, "prices", "", "data"));
        config.market_caps = resolve_path(base_dir, get_or<std::string>(d, "market_caps", "", "data"));
        config.schema.date_column = get_or(d, "date_column", config.schema.date_column, "data");
        config.schema.index_column = get_or(d, "index_column", config.schema.index_column, "data");
        config.schema.mc_id_column = get_or(d, "mc_id_column", config.schema.mc_id_column, "data");
        config.schema.mc_value_column = get_or(d, "mc_value_column", config.schema.mc_value_column, "data");
        config.schema.mc_row_label = get_or(d, "mc_row_label", config.schema.mc_row_label, "data");
    }

    config.k = get_count(doc, "k", 0, "");
    config.h = get_count(doc, "h", config.k, "");
    config.n = get_count(doc, "n", 0, "");
    if (doc.contains("presets")) {
        const auto& p = doc["presets"];
        if (!p.is_array()) throw ConfigError("presets: expected an array of names");
        for (const auto& name : p) {
            if (!name.is_string()) throw ConfigError("presets: expected strings");
            parse_preset(name.get<std::string>());
            config.presets.push_back(name.get<std::string>());
        }
    }

    if (doc.contains("estimation")) {
        const auto& e = doc["estimation"];
        check_keys(e, {"lookback", "shrinkage", "linear_weights"}, "estimation");
        config.backtest.correlation.lookback =
            get_count(e, "lookback", config.backtest.correlation.lookback, "estimation");
        config.backtest.correlation.shrinkage =
            get_or(e, "shrinkage", config.backtest.correlation.shrinkage, "estimation");
        config.backtest.correlation.linear_weights =
            get_or(e, "linear_weights", config.backtest.correlation.linear_weights, "estimation");
        if (!(config.backtest.correlation.shrinkage >= 0.0 && config.backtest.correlation.shrinkage <= 1.0)) {
            throw ConfigError("estimation.shrinkage: must lie in [0, 1]");
        }
        if (config.backtest.correlation.lookback < 3) throw ConfigError("estimation.lookback: must be >= 3");
    }

    if (doc.contains("solver")) {
        const auto& s = doc["solver"];
        check_keys(s, {"seed", "restarts", "sweeps", "cooling", "moves_per_sweep", "initial_temperature",
                       "parallel_restarts"},
                   "solver");
        auto& sa = config.solver;
        sa.rng_seed = get_or<std::uint64_t>(s, "seed", sa.rng_seed, "solver");
        sa.restarts = get_count(s, "restarts", sa.restarts, "solver");
        sa.sweeps = get_count(s, "sweeps", sa.sweeps, "solver");
        sa.cooling_ratio = get_or(s, "cooling", sa.cooling_ratio, "solver");
        if (s.contains("moves_per_sweep")) sa.moves_per_sweep = get_count(s, "moves_per_sweep", 1, "solver");
        if (s.contains("initial_temperature")) {
            sa.initial_temperature = get_or<double>(s, "initial_temperature", 1.0, "solver");
        }
        sa.parallel_restarts = get_or(s, "parallel_restarts", sa.parallel_restarts, "solver");
    }
    try {
        config.solver.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }

    if (doc.contains("backtest")) {
        const auto& b = doc["backtest"];
        check_keys(b, {"horizons", "long_horizons", "sample_size", "sampling", "weight_window", "weighting"},
                   "backtest");
        auto& bt = config.backtest;
        bt.horizons = get_counts(b, "horizons", bt.horizons, "backtest");
        bt.long_horizons = get_counts(b, "long_horizons", bt.long_horizons, "backtest");
        bt.sample_size = get_count(b, "sample_size", bt.sample_size, "backtest");
        bt.weight_window = get_count(b, "weight_window", bt.weight_window, "backtest");
        if (b.contains("sampling")) bt.sampling = parse_sampling(get_or<std::string>(b, "sampling", "", "backtest"));
        const auto weighting = get_or<std::string>(b, "weighting", "tracking_error", "backtest");
        if (weighting == "tracking_error") {
            bt.weighting = WeightingMode::tracking_error;
        } else if (weighting == "index_weights") {
            bt.weighting = WeightingMode::index_weights;
        } else {
            throw ConfigError("backtest.weighting: expected tracking_error or index_weights");
        }
        if (bt.sample_size < 1) throw ConfigError("backtest.sample_size: must be >= 1");
        if (bt.weight_window < 1) throw ConfigError("backtest.weight_window: must be >= 1");
    }

    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        check_keys(s, {"assets", "days", "factors", "seed", "factor_vol", "idio_vol", "drift", "pareto_shape",
                       "start_date"},
                   "synth");
        auto& sy = config.synth;
        sy.assets = get_count(s, "assets", sy.assets, "synth");
        sy.days = get_count(s, "days", sy.days, "synth");
        sy.factors = get_count(s, "factors", sy.factors, "synth");
        sy.seed = get_or<std::uint64_t>(s, "seed", sy.seed, "synth");
        sy.factor_vol = get_or(s, "factor_vol", sy.factor_vol, "synth");
        sy.idio_vol = get_or(s, "idio_vol", sy.idio_vol, "synth");
        sy.drift = get_or(s, "drift", sy.drift, "synth");
        sy.pareto_shape = get_or(s, "pareto_shape", sy.pareto_shape, "synth");
        if (s.contains("start_date")) {
            try {
                sy.start = parse_iso_date(get_or<std::string>(s, "start_date", "", "synth"));
            } catch (const ValidationError& e) {
                throw ConfigError(std::string("synth.start_date: ") + e.what());
            }
        }
    }

    config.output_dir = resolve_path(base_dir, get_or<std::string>(doc, "output_dir", "out", ""));
    resolve_plans(config);
    return config;
}

json read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "': file not found or unreadable");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return doc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_config_document(path), path.parent_path());
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    return hash;
}

std::string run_manifest(const RunConfig& config, std::string_view command) {
    const auto canonical = config.effective.dump();
    std::string out = fmt::format("tool sit {}\n", kVersion);
    out += fmt::format("command {}\n", command);
    out += fmt::format("config_hash {:016x}\n", fnv1a64(canonical));
    out += fmt::format("solver_seed {}\n", config.solver.rng_seed);
    out += fmt::format("synth_seed {}\n", config.synth.seed);
    out += "config " + canonical + "\n";
    return out;
}

}  // namespace sit
