#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sit/selection.hpp"
#include "sit/solver.hpp"

namespace sit {

/// One or more selection stages sharing K, H and N, followed by a union capped at m_star.
struct StagePlan {
    std::string name;
    std::vector<SelectionParams> stages;
    std::size_t m_star = 0;

    void validate() const;
};

/// Selected MC-rank positions (0-based, ascending) and, per position, the 1-based
/// numbers of the stages that picked it.
struct SelectedSet {
    std::vector<std::size_t> indices;
    std::vector<std::vector<std::size_t>> provenance;

    std::size_t size() const { return indices.size(); }
    bool contains(std::size_t index) const;

    friend bool operator==(const SelectedSet&, const SelectedSet&) = default;
};

using StageSolver = std::function<SolveResult(const SelectionProblem&)>;

/// Solves every stage independently with `solver`. Errors are rethrown as StageError.
std::vector<SolveResult> solve_stages(const StagePlan& plan, const DistanceMatrix& d,
                                      const StageSolver& solver);

std::vector<SelectedSet> run_stages(const StagePlan& plan, const DistanceMatrix& d,
                                    const StageSolver& solver);
std::vector<SelectedSet> run_stages(const StagePlan& plan, const DistanceMatrix& d,
                                    const SaConfig& cfg);

/// Set of stage `stage_number` built from a solved selection.
SelectedSet to_selected_set(const Selection& sel, std::size_t stage_number);

/// Union of the stage sets, keeping the `m_star` members with the smallest MC rank.
SelectedSet union_and_truncate(std::span<const SelectedSet> stage_sets, std::size_t m_star);

}  // namespace sit
