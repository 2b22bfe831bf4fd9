#include "sit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <fmt/format.h>

#include "sit/errors.hpp"
#include "sit/rng.hpp"

namespace sit {

void SaConfig::validate() const {
    if (initial_temperature && !(*initial_temperature > 0.0)) {
        throw ParameterError("initial_temperature must be positive");
    }
    if (!(cooling_ratio > 0.0 && cooling_ratio < 1.0)) {
        throw ParameterError(fmt::format("cooling_ratio must lie in (0, 1), got {}", cooling_ratio));
    }
    if (sweeps < 1) throw ParameterError("sweeps must be at least 1");
    if (moves_per_sweep && *moves_per_sweep < 1) throw ParameterError("moves_per_sweep must be at least 1");
    if (restarts < 1) throw ParameterError("restarts must be at least 1");
}

double feasible_count(const SelectionParams& params) {
    const auto pool = params.h - params.n;
    const auto pick = params.m - params.n;
    double c = 1.0;
    for (std::size_t i = 1; i <= pick; ++i) {
        c = c * static_cast<double>(pool - pick + i) / static_cast<double>(i);
    }
    return std::round(c);
}

namespace {

bool better(double value, const Selection& sel, double best_value, const Selection& best) {
    if (value != best_value) return value < best_value;
    return lexicographically_less(sel, best);
}

/// Swap-neighborhood state: membership, the two free-index pools, and the
/// interaction sums c[k] = sum_{j in S} d[k][j] for every free k.
class SwapState {
public:
    SwapState(const SelectionProblem& problem, Rng& rng) : problem_(problem) {
        const auto& p = problem.params();
        sel_.x.assign(p.k, 0);
        for (std::size_t i = 0; i < p.n; ++i) sel_.x[i] = 1;
        std::vector<std::size_t> pool(p.h - p.n);
        std::iota(pool.begin(), pool.end(), p.n);
        const std::size_t pick = p.m - p.n;
        for (std::size_t i = 0; i < pick; ++i) {
            const std::size_t j = i + rng.below(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        in_.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(pick));
        out_.assign(pool.begin() + static_cast<std::ptrdiff_t>(pick), pool.end());
        for (auto i : in_) sel_.x[i] = 1;

        interaction_.assign(p.k, 0.0);
        const auto members = sel_.indices();
        for (std::size_t k = p.n; k < p.h; ++k) {
            double c = 0.0;
            for (auto j : members) c += problem.distance(k, j);
            interaction_[k] = c;
        }
        value_ = objective(problem, sel_);
    }

    bool has_moves() const { return !in_.empty() && !out_.empty(); }
    std::size_t in_count() const { return in_.size(); }
    std::size_t out_count() const { return out_.size(); }

    double delta(std::size_t in_pos, std::size_t out_pos) const {
        const auto leaving = in_[in_pos];
        const auto entering = out_[out_pos];
        const auto& p = problem_.params();
        const auto& rs = problem_.row_sums();
        return p.beta * (rs[entering] - rs[leaving]) -
               p.alpha * (interaction_[entering] - interaction_[leaving] -
                          problem_.distance(leaving, entering));
    }

    void apply(std::size_t in_pos, std::size_t out_pos, double delta) {
        const auto leaving = in_[in_pos];
        const auto entering = out_[out_pos];
        const auto& p = problem_.params();
        for (std::size_t k = p.n; k < p.h; ++k) {
            interaction_[k] += problem_.distance(k, entering) - problem_.distance(k, leaving);
        }
        sel_.x[leaving] = 0;
        sel_.x[entering] = 1;
        in_[in_pos] = entering;
        out_[out_pos] = leaving;
        value_ += delta;
    }

    double value() const { return value_; }
    const Selection& selection() const { return sel_; }

private:
    const SelectionProblem& problem_;
    Selection sel_;
    std::vector<std::size_t> in_;
    std::vector<std::size_t> out_;
    std::vector<double> interaction_;
    double value_ = 0.0;
};

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(restart) + 1));
}

struct RestartOutcome {
    Selection best;
    double objective = 0.0;
};

RestartOutcome anneal_once(const SelectionProblem& problem, double t0, std::size_t sweeps,
                           std::size_t moves, double cooling, std::uint64_t seed) {
    Rng rng(seed);
    SwapState state(problem, rng);
    Selection best = state.selection();
    double best_tracked = state.value();
    if (state.has_moves()) {
        double temperature = t0;
        for (std::size_t s = 0; s < sweeps; ++s) {
            for (std::size_t mv = 0; mv < moves; ++mv) {
                const auto a = rng.below(state.in_count());
                const auto b = rng.below(state.out_count());
                const double d = state.delta(a, b);
                if (d <= 0.0 || rng.uniform() < std::exp(-d / temperature)) {
                    state.apply(a, b, d);
                    if (state.value() < best_tracked) {
                        best_tracked = state.value();
                        best = state.selection();
                    }
                }
            }
            temperature *= cooling;
        }
    }
    return {best, objective(problem, best)};
}

}  // namespace

double calibrate_temperature(const SelectionProblem& problem, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0xA5A5A5A5DEADBEEFULL));
    SwapState state(problem, rng);
    if (!state.has_moves()) return 1.0;
    double sum = 0.0;
    constexpr int kSamples = 100;
    for (int i = 0; i < kSamples; ++i) {
        const auto a = rng.below(state.in_count());
        const auto b = rng.below(state.out_count());
        sum += std::abs(state.delta(a, b));
    }
    const double mean = sum / kSamples;
    return mean > 0.0 ? mean : 1.0;
}

SolveResult solve_exact(const SelectionProblem& problem, double limit) {
    const auto& p = problem.params();
    const double combos = feasible_count(p);
    if (combos > limit) {
        throw CapacityError(fmt::format("exact enumeration needs C({}, {}) = {:.0f} combinations, "
                                        "limit is {:.0f}",
                                        p.h - p.n, p.m - p.n, combos, limit),
                            combos);
    }
    const auto& rs = problem.row_sums();
    const std::size_t pick = p.m - p.n;

    // Members in insertion order; forced assets first.
    std::vector<std::size_t> members;
    double base_linear = 0.0;
    double base_quad = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        for (auto j : members) base_quad += 2.0 * problem.distance(i, j);
        members.push_back(i);
        base_linear += rs[i];
    }

    std::vector<std::size_t> best_combo;
    double best_value = 0.0;
    bool have_best = false;
    std::vector<std::size_t> combo;

    // Lexicographic DFS, so the first of any exact tie is the smallest index set.
    auto dfs = [&](auto&& self, std::size_t start, double linear, double quad) -> void {
        if (combo.size() == pick) {
            const double value = p.beta * linear - 0.5 * p.alpha * quad;
            if (!have_best || value < best_value) {
                best_value = value;
                best_combo = combo;
                have_best = true;
            }
            return;
        }
        const std::size_t remaining = pick - combo.size();
        for (std::size_t e = start; e + remaining <= p.h; ++e) {
            double cross = 0.0;
            for (auto j : members) cross += problem.distance(e, j);
            members.push_back(e);
            combo.push_back(e);
            self(self, e + 1, linear + rs[e], quad + 2.0 * cross);
            combo.pop_back();
            members.pop_back();
        }
    };
    dfs(dfs, p.n, base_linear, base_quad);

    std::vector<std::size_t> chosen(members.begin(), members.end());
    chosen.insert(chosen.end(), best_combo.begin(), best_combo.end());
    SolveResult result;
    result.selection = Selection::from_indices(p.k, chosen);
    result.objective = objective(problem, result.selection);
    result.stage_log.push_back({"exact", result.objective});
    return result;
}

SolveResult solve_sa(const SelectionProblem& problem, const SaConfig& cfg) {
    cfg.validate();
    const auto& p = problem.params();
    const double t0 = cfg.initial_temperature ? *cfg.initial_temperature
                                              : calibrate_temperature(problem, cfg.rng_seed);
    const std::size_t moves = cfg.moves_per_sweep ? *cfg.moves_per_sweep
                                                  : std::max<std::size_t>(1, 4 * (p.h - p.n));

    std::vector<RestartOutcome> outcomes(cfg.restarts);
    if (cfg.parallel_restarts && cfg.restarts > 1) {
        std::vector<std::future<RestartOutcome>> futures;
        for (std::size_t r = 0; r < cfg.restarts; ++r) {
            futures.push_back(std::async(std::launch::async, anneal_once, std::cref(problem), t0,
                                         cfg.sweeps, moves, cfg.cooling_ratio,
                                         restart_seed(cfg.rng_seed, r)));
        }
        for (std::size_t r = 0; r < cfg.restarts; ++r) outcomes[r] = futures[r].get();
    } else {
        for (std::size_t r = 0; r < cfg.restarts; ++r) {
            outcomes[r] = anneal_once(problem, t0, cfg.sweeps, moves, cfg.cooling_ratio,
                                      restart_seed(cfg.rng_seed, r));
        }
    }

    std::size_t best = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r) {
        if (better(outcomes[r].objective, outcomes[r].best, outcomes[best].objective,
                   outcomes[best].best)) {
            best = r;
        }
    }
    SolveResult result;
    result.selection = outcomes[best].best;
    result.objective = outcomes[best].objective;
    result.stage_log.push_back({"sa", result.objective});
    result.seed_used = cfg.rng_seed;
    return result;
}

SolveResult post_process_swaps(const SelectionProblem& problem, const Selection& start,
                               std::size_t max_passes) {
    Selection sel = start;
    double current = objective(problem, sel);
    SolveResult result;
    const auto lo = problem.free_begin();
    const auto hi = problem.free_end();

    for (std::size_t pass = 1; pass <= max_passes; ++pass) {
        result.passes = pass;
        bool applied = false;
        for (std::size_t i = lo; i < hi; ++i) {
            if (!sel.contains(i)) continue;
            for (std::size_t j = lo; j < hi; ++j) {
                if (sel.contains(j)) continue;
                // The O(M) delta screens candidates; the full objective decides.
                const double screen = objective_delta_swap(problem, sel, i, j);
                if (screen >= 1e-9 * (1.0 + std::abs(current))) continue;
                Selection trial = sel;
                trial.x[i] = 0;
                trial.x[j] = 1;
                const double value = objective(problem, trial);
                if (value < current) {
                    result.swaps.push_back({i, j, current, value});
                    sel = std::move(trial);
                    current = value;
                    applied = true;
                    break;
                }
            }
        }
        if (!applied) break;
    }
    result.selection = std::move(sel);
    result.objective = current;
    result.stage_log.push_back({"swap", current});
    return result;
}

SolveResult solve(const SelectionProblem& problem, const SaConfig& cfg) {
    auto sa = solve_sa(problem, cfg);
    auto refined = post_process_swaps(problem, sa.selection);
    refined.stage_log.insert(refined.stage_log.begin(), sa.stage_log.begin(), sa.stage_log.end());
    refined.seed_used = sa.seed_used;
    return refined;
}

std::string format_solve_report(const SelectionProblem& problem, const SolveResult& result) {
    std::string out = fmt::format("objective {}\n", result.objective);
    out += fmt::format("seed {}\n", result.seed_used);
    out += "selected";
    for (auto i : result.selection.indices()) out += " " + problem.asset_ids()[i];
    out += "\n";
    for (const auto& log : result.stage_log) out += fmt::format("phase {} {}\n", log.phase, log.objective);
    out += fmt::format("swaps {}\n", result.swaps.size());
    return out;
}

}  // namespace sit
