#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sit/errors.hpp"
#include "sit/selection.hpp"
#include "support.hpp"

using namespace sit;
using sit::test::double_sum_objective;

namespace {

Eigen::MatrixXd five_by_five() {
    Eigen::MatrixXd d(5, 5);
    d << 0, 1, 2, 1.5, 0.5,
         1, 0, 1.2, 0.7, 1.1,
         2, 1.2, 0, 0.3, 1.9,
         1.5, 0.7, 0.3, 0, 0.8,
         0.5, 1.1, 1.9, 0.8, 0;
    return d;
}

SelectionParams params(std::size_t k, std::size_t h, std::size_t n, std::size_t m, double alpha, double beta) {
    SelectionParams p;
    p.k = k;
    p.h = h;
    p.n = n;
    p.m = m;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

}  // namespace

TEST(SelectionParams, InequalityViolationsNameTheInequality) {
    try {
        params(10, 8, 3, 2, 0, 0).validate();
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("N <= M"), std::string::npos);
    }
    EXPECT_THROW(params(10, 4, 1, 5, 0, 0).validate(), ParameterError);
    EXPECT_THROW(params(10, 11, 1, 5, 0, 0).validate(), ParameterError);
    EXPECT_THROW(params(10, 8, 1, 5, -0.1, 0).validate(), ParameterError);
    EXPECT_THROW(params(10, 8, 1, 5, 0, -1).validate(), ParameterError);
    EXPECT_NO_THROW(params(10, 10, 0, 0, 0, 0).validate());
}

TEST(BuildProblem, UniformDistancesGiveEqualRowSums) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, std::sqrt(2.0));
    d.diagonal().setZero();
    const auto problem = build_problem(sit::test::distances_from(d), params(4, 4, 1, 2, 1, 1));
    for (double r : problem.row_sums()) EXPECT_NEAR(r, 3.0 * std::sqrt(2.0), 1e-15);
}

TEST(BuildProblem, RowSumsMatchHandSums) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(5, 5, 0, 2, 1, 1));
    const std::vector<double> expected{5.0, 4.0, 5.4, 3.3, 4.3};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(problem.row_sums()[i], expected[i], 1e-12);
}

TEST(BuildProblem, TruncatesToTopK) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(3, 3, 0, 2, 1, 1));
    EXPECT_EQ(problem.size(), 3u);
    EXPECT_NEAR(problem.row_sums()[0], 3.0, 1e-12);
    EXPECT_NEAR(problem.row_sums()[2], 3.2, 1e-12);
    EXPECT_EQ(problem.asset_ids().size(), 3u);
}

TEST(BuildProblem, RejectsInvalidParams) {
    EXPECT_THROW(build_problem(sit::test::distances_from(five_by_five()), params(5, 5, 3, 2, 1, 1)),
                 ParameterError);
    EXPECT_THROW(build_problem(sit::test::distances_from(five_by_five()), params(6, 6, 0, 2, 1, 1)),
                 ParameterError);
}

TEST(Objective, LinearTermOnly) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(5, 5, 0, 2, 0, 1));
    const auto sel = Selection::from_indices(5, std::vector<std::size_t>{1, 3});
    EXPECT_NEAR(objective(problem, sel), 4.0 + 3.3, 1e-12);
}

TEST(Objective, QuadraticTermOfAPair) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(5, 5, 0, 2, 1, 0));
    const auto sel = Selection::from_indices(5, std::vector<std::size_t>{0, 2});
    EXPECT_DOUBLE_EQ(objective(problem, sel), -2.0);
}

TEST(Objective, SixAssetFixtureMatchesDoubleSum) {
    std::mt19937_64 gen(6);
    const auto d = sit::test::random_distances(6, gen);
    const auto problem = build_problem(d, params(6, 6, 0, 3, 1, 1));
    for (const auto& combo : sit::test::combinations(0, 6, 3)) {
        const auto sel = Selection::from_indices(6, combo);
        EXPECT_NEAR(objective(problem, sel), double_sum_objective(d.d, combo, 1, 1, 6), 1e-12);
    }
}

TEST(Objective, InfeasibleSelectionsAreRejected) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(5, 4, 1, 2, 1, 1));
    EXPECT_THROW(objective(problem, Selection::from_indices(5, std::vector<std::size_t>{1, 2})), FeasibilityError);
    EXPECT_THROW(objective(problem, Selection::from_indices(5, std::vector<std::size_t>{0, 4})), FeasibilityError);
    EXPECT_THROW(objective(problem, Selection::from_indices(5, std::vector<std::size_t>{0, 1, 2})),
                 FeasibilityError);
    EXPECT_TRUE(is_feasible(problem, Selection::from_indices(5, std::vector<std::size_t>{0, 3})));
}

TEST(Objective, EvaluationIsBitReproducible) {
    std::mt19937_64 gen(8);
    const auto d = sit::test::random_distances(25, gen);
    const auto problem = build_problem(d, params(25, 20, 2, 8, 0.3, 0.05));
    const auto sel = Selection::from_indices(25, std::vector<std::size_t>{0, 1, 4, 7, 9, 12, 15, 19});
    const double first = objective(problem, sel);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(objective(problem, sel), first);
}

TEST(Objective, CbsCaseEqualsDirectFormulation) {
    // N = 0: objective equals the unconstrained-by-forcing formulation evaluated directly.
    std::mt19937_64 gen(12);
    const auto d = sit::test::random_distances(15, gen);
    const auto problem = build_problem(d, params(15, 15, 0, 5, 0.2, 1.0 / 15));
    std::uniform_int_distribution<std::size_t> pick(0, 14);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> chosen;
        while (chosen.size() < 5) {
            const auto i = pick(gen);
            if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
        }
        std::sort(chosen.begin(), chosen.end());
        EXPECT_NEAR(objective(problem, Selection::from_indices(15, chosen)),
                    double_sum_objective(d.d, chosen, 0.2, 1.0 / 15, 15), 1e-12);
    }
}

TEST(SwapDelta, MatchesFullRecomputeOnFixture) {
    std::mt19937_64 gen(6);
    const auto d = sit::test::random_distances(6, gen);
    const auto problem = build_problem(d, params(6, 6, 0, 3, 1, 1));
    for (const auto& combo : sit::test::combinations(0, 6, 3)) {
        const auto sel = Selection::from_indices(6, combo);
        const double base = objective(problem, sel);
        for (std::size_t out = 0; out < 6; ++out) {
            if (!sel.contains(out)) continue;
            for (std::size_t in = 0; in < 6; ++in) {
                if (sel.contains(in)) continue;
                auto after = sel;
                after.x[out] = 0;
                after.x[in] = 1;
                EXPECT_NEAR(objective_delta_swap(problem, sel, out, in), objective(problem, after) - base, 1e-12);
            }
        }
    }
}

TEST(SwapDelta, DuplicateRowsGiveZeroDelta) {
    Eigen::MatrixXd d(4, 4);
    d << 0, 1, 1, 0.5,
         1, 0, 0, 1.5,
         1, 0, 0, 1.5,
         0.5, 1.5, 1.5, 0;
    const auto problem = build_problem(sit::test::distances_from(d), params(4, 4, 0, 2, 1, 1));
    const auto sel = Selection::from_indices(4, std::vector<std::size_t>{1, 3});
    EXPECT_EQ(objective_delta_swap(problem, sel, 1, 2), 0.0);
}

TEST(SwapDelta, ForcedOrWrongMembershipIsMoveError) {
    const auto problem = build_problem(sit::test::distances_from(five_by_five()), params(5, 4, 1, 2, 1, 1));
    const auto sel = Selection::from_indices(5, std::vector<std::size_t>{0, 1});
    EXPECT_THROW(objective_delta_swap(problem, sel, 0, 2), MoveError);
    EXPECT_THROW(objective_delta_swap(problem, sel, 1, 4), MoveError);
    EXPECT_THROW(objective_delta_swap(problem, sel, 2, 3), MoveError);
}

TEST(SwapDelta, ChainedSwapsTrackFullRecompute) {
    std::mt19937_64 gen(99);
    const auto d = sit::test::random_distances(30, gen);
    const auto problem = build_problem(d, params(30, 25, 3, 10, 1.0 / 10, 1.0 / 25));
    std::vector<std::size_t> chosen{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    auto sel = Selection::from_indices(30, chosen);
    double running = objective(problem, sel);
    std::uniform_int_distribution<std::size_t> free_pick(3, 24);
    for (int step = 0; step < 10000; ++step) {
        std::size_t out, in;
        do { out = free_pick(gen); } while (!sel.contains(out));
        do { in = free_pick(gen); } while (sel.contains(in));
        running += objective_delta_swap(problem, sel, out, in);
        sel.x[out] = 0;
        sel.x[in] = 1;
    }
    EXPECT_NEAR(running, objective(problem, sel), 1e-6);
    EXPECT_TRUE(is_feasible(problem, sel));
}

TEST(Selection, LexicographicOrderPrefersSmallerIndices) {
    const auto a = Selection::from_indices(6, std::vector<std::size_t>{0, 2, 5});
    const auto b = Selection::from_indices(6, std::vector<std::size_t>{0, 3, 4});
    EXPECT_TRUE(lexicographically_less(a, b));
    EXPECT_FALSE(lexicographically_less(b, a));
    EXPECT_FALSE(lexicographically_less(a, a));
}

TEST(Instance, RoundTripsThroughText) {
    std::mt19937_64 gen(4);
    const auto d = sit::test::random_distances(9, gen);
    const auto problem = build_problem(d, params(9, 7, 1, 3, 1.0 / 3, 1.0 / 7));
    std::stringstream s;
    write_instance(problem, s);
    const auto back = read_instance(s);
    EXPECT_EQ(back.params().k, 9u);
    EXPECT_EQ(back.params().h, 7u);
    EXPECT_EQ(back.params().n, 1u);
    EXPECT_EQ(back.params().m, 3u);
    EXPECT_EQ(back.params().alpha, 1.0 / 3);
    EXPECT_EQ(back.params().beta, 1.0 / 7);
    EXPECT_TRUE(back.distances().isApprox(problem.distances(), 0.0));
}

TEST(Instance, TruncatedFileIsParseError) {
    std::stringstream s("3 3 0 1 1 1\n0 1 2\n1 0 1\n");
    EXPECT_THROW(read_instance(s), ParseError);
}
