#include "sit/presets.hpp"

#include "sit/errors.hpp"

namespace sit {

Preset parse_preset(std::string_view name) {
    if (name == "E1") return Preset::E1;
    if (name == "E2") return Preset::E2;
    if (name == "E3") return Preset::E3;
    if (name == "E4") return Preset::E4;
    if (name == "E5") return Preset::E5;
    if (name == "E6") return Preset::E6;
    throw ConfigError("unknown preset '" + std::string(name) + "', expected one of E1..E6");
}

std::string preset_name(Preset preset) {
    return "E" + std::to_string(static_cast<int>(preset) + 1);
}

namespace {

constexpr std::size_t kPortfolioSize = 30;
constexpr std::size_t kStageSize = 20;

SelectionParams single(std::size_t k, std::size_t h, std::size_t n) {
    const double m = kPortfolioSize;
    return SelectionParams{k, h, n, kPortfolioSize, 1.0 / m, 1.0 / static_cast<double>(h)};
}

StagePlan two_stage(std::size_t k, std::size_t h, std::size_t n) {
    const double m = kStageSize;
    const double beta = 1.0 / static_cast<double>(h);
    StagePlan plan;
    plan.stages.push_back(SelectionParams{k, h, n, kStageSize, 1.0 / m, beta});
    plan.stages.push_back(SelectionParams{k, h, n, kStageSize, 2.0 / m, beta});
    plan.m_star = kPortfolioSize;
    return plan;
}

}  // namespace

StagePlan preset_plan(Preset preset, std::size_t k, std::size_t h) {
    StagePlan plan;
    switch (preset) {
        case Preset::E1:
            // M = N: the forced top tier is the only feasible set, alpha and beta play no role.
            plan.stages.push_back(SelectionParams{k, h, kPortfolioSize, kPortfolioSize, 0.0, 0.0});
            plan.m_star = kPortfolioSize;
            break;
        case Preset::E2:
            plan.stages.push_back(single(k, h, 10));
            plan.m_star = kPortfolioSize;
            break;
        case Preset::E3:
            plan.stages.push_back(single(k, h, 5));
            plan.m_star = kPortfolioSize;
            break;
        case Preset::E4:
            plan.stages.push_back(single(k, h, 0));
            plan.m_star = kPortfolioSize;
            break;
        case Preset::E5:
            plan = two_stage(k, h, 0);
            break;
        case Preset::E6:
            plan = two_stage(k, h, 5);
            break;
    }
    plan.name = preset_name(preset);
    plan.validate();
    return plan;
}

StagePlan preset_plan(std::string_view name, std::size_t k, std::size_t h) {
    return preset_plan(parse_preset(name), k, h);
}

}  // namespace sit
