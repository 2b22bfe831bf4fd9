#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sit/selection.hpp"

namespace sit {

/// Simulated-annealing schedule. Unset optionals take problem-dependent defaults.
struct SaConfig {
    /// Default: mean |delta| over 100 random swaps from a random start.
    std::optional<double> initial_temperature;
    double cooling_ratio = 0.97;
    std::size_t sweeps = 300;
    /// Default: 4 * (H - N).
    std::optional<std::size_t> moves_per_sweep;
    std::size_t restarts = 8;
    std::uint64_t rng_seed = 20240131;
    /// Run restarts on separate threads. The result does not depend on this flag.
    bool parallel_restarts = false;

    void validate() const;
};

struct PhaseLog {
    std::string phase;
    double objective = 0.0;
};

struct SwapRecord {
    std::size_t out_idx = 0;
    std::size_t in_idx = 0;
    double objective_before = 0.0;
    double objective_after = 0.0;
};

struct SolveResult {
    Selection selection;
    double objective = 0.0;
    std::vector<PhaseLog> stage_log;
    std::uint64_t seed_used = 0;
    /// Swaps applied by post-processing, in order.
    std::vector<SwapRecord> swaps;
    std::size_t passes = 0;
};

inline constexpr double kExactCombinationLimit = 1e7;

/// Number of feasible selections, C(H-N, M-N), as a double.
double feasible_count(const SelectionParams& params);

/// Exhaustive enumeration; ties go to the lexicographically smallest index set.
/// Throws CapacityError when the feasible count exceeds `limit`.
SolveResult solve_exact(const SelectionProblem& problem, double limit = kExactCombinationLimit);

SolveResult solve_sa(const SelectionProblem& problem, const SaConfig& cfg = {});

/// Mean |delta| of 100 random swaps from a random start; 1.0 when every sampled delta is zero.
double calibrate_temperature(const SelectionProblem& problem, std::uint64_t seed);

/// Pairwise swap descent: ordered pairs (selected free i, unselected free j) scanned in
/// ascending order, a swap applied only when it strictly lowers the objective, passes
/// repeated until none applies or `max_passes` is reached.
SolveResult post_process_swaps(const SelectionProblem& problem, const Selection& start,
                               std::size_t max_passes = 50);

/// solve_sa followed by post_process_swaps.
SolveResult solve(const SelectionProblem& problem, const SaConfig& cfg = {});

/// Plain-text report: objective, selected ids in MC order, phase log.
std::string format_solve_report(const SelectionProblem& problem, const SolveResult& result);

}  // namespace sit
