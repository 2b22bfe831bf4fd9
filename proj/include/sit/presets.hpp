#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "sit/multi_stage.hpp"

namespace sit {

/// Hyper-parameter presets E1..E6 (30-asset portfolios).
enum class Preset { E1, E2, E3, E4, E5, E6 };

/// Throws ConfigError for anything other than E1..E6.
Preset parse_preset(std::string_view name);
std::string preset_name(Preset preset);

/// Builds the stage plan of `preset` over a universe of `k` candidates capped at `h`.
StagePlan preset_plan(Preset preset, std::size_t k, std::size_t h);
StagePlan preset_plan(std::string_view name, std::size_t k, std::size_t h);

}  // namespace sit
