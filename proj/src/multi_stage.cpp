#include "sit/multi_stage.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "sit/errors.hpp"

namespace sit {

void StagePlan::validate() const {
    if (stages.empty()) throw ParameterError("stage plan has no stages");
    if (m_star < 1) throw ParameterError("m_star must be at least 1");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        try {
            stages[i].validate();
        } catch (const ParameterError& e) {
            throw StageError(i + 1, e.what());
        }
        const auto& s = stages[i];
        const auto& first = stages.front();
        if (s.k != first.k || s.h != first.h || s.n != first.n) {
            throw StageError(i + 1, "stages must share K, H and N");
        }
    }
}

bool SelectedSet::contains(std::size_t index) const {
    return std::binary_search(indices.begin(), indices.end(), index);
}

SelectedSet to_selected_set(const Selection& sel, std::size_t stage_number) {
    SelectedSet set;
    set.indices = sel.indices();
    set.provenance.assign(set.indices.size(), {stage_number});
    return set;
}

std::vector<SolveResult> solve_stages(const StagePlan& plan, const DistanceMatrix& d,
                                      const StageSolver& solver) {
    plan.validate();
    std::vector<SolveResult> results;
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
        try {
            const auto problem = build_problem(d, plan.stages[i]);
            results.push_back(solver(problem));
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(i + 1, e.what());
        }
    }
    return results;
}

std::vector<SelectedSet> run_stages(const StagePlan& plan, const DistanceMatrix& d,
                                    const StageSolver& solver) {
    const auto results = solve_stages(plan, d, solver);
    std::vector<SelectedSet> sets;
    for (std::size_t i = 0; i < results.size(); ++i) {
        sets.push_back(to_selected_set(results[i].selection, i + 1));
    }
    return sets;
}

std::vector<SelectedSet> run_stages(const StagePlan& plan, const DistanceMatrix& d,
                                    const SaConfig& cfg) {
    return run_stages(plan, d, [&cfg](const SelectionProblem& p) { return solve(p, cfg); });
}

SelectedSet union_and_truncate(std::span<const SelectedSet> stage_sets, std::size_t m_star) {
    if (stage_sets.empty()) throw ParameterError("union_and_truncate needs at least one stage set");
    std::map<std::size_t, std::vector<std::size_t>> merged;
    for (const auto& set : stage_sets) {
        for (std::size_t i = 0; i < set.indices.size(); ++i) {
            auto& stages = merged[set.indices[i]];
            if (i < set.provenance.size()) {
                stages.insert(stages.end(), set.provenance[i].begin(), set.provenance[i].end());
            }
        }
    }
    SelectedSet out;
    // Ascending MC rank: keep members while the running count stays within m_star.
    for (auto& [index, stages] : merged) {
        if (out.indices.size() == m_star) break;
        std::sort(stages.begin(), stages.end());
        stages.erase(std::unique(stages.begin(), stages.end()), stages.end());
        out.indices.push_back(index);
        out.provenance.push_back(std::move(stages));
    }
    return out;
}

}  // namespace sit
