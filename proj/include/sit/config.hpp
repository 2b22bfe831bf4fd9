#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sit/backtest.hpp"
#include "sit/market_data.hpp"
#include "sit/multi_stage.hpp"
#include "sit/solver.hpp"
#include "sit/synth.hpp"

namespace sit {

/// Everything one CLI run needs, resolved from a JSON config file. See docs/config.md.
struct RunConfig {
    std::filesystem::path prices;
    std::filesystem::path market_caps;
    CsvSchema schema;

    std::size_t k = 0;
    std::size_t h = 0;
    std::size_t n = 0;
    std::vector<std::string> presets;

    std::vector<StagePlan> plans;  // presets first, then the custom plan if any
    SaConfig solver;
    BacktestSettings backtest;
    SynthConfig synth;
    std::filesystem::path output_dir = "out";

    /// Effective configuration after overrides; hashed into run manifests.
    nlohmann::json effective;
};

/// Resolves "1/M", "2/M", "1/H" style values (any positive number over M or H) or plain numbers.
double resolve_parameter(const nlohmann::json& value, std::size_t m, std::size_t h,
                         const std::string& field);

/// Parses and validates a config document. Relative paths are resolved against `base_dir`.
/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads the JSON document; ConfigError on malformed JSON.
nlohmann::json read_config_document(const std::filesystem::path& path);

RunConfig load_run_config(const std::filesystem::path& path);

/// Rebuilds `plans` after `presets`, universe or stage fields changed.
void resolve_plans(RunConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

/// Manifest text: tool version, config hash, seed, command and the effective config.
std::string run_manifest(const RunConfig& config, std::string_view command);

inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace sit
