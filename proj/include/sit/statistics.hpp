#pragma once

#include <span>
#include <string>
#include <vector>

namespace sit {

enum class TestName { wilcoxon_signed_rank, levene };

std::string to_string(TestName name);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool rejected_at_5pct = false;
    TestName test_name = TestName::wilcoxon_signed_rank;
};

inline constexpr double kSignificance = 0.05;

double mean(std::span<const double> values);
/// Unbiased (n - 1) sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> values);

/// Midranks (1-based) of `values`; tied values share the average of their ranks.
std::vector<double> midranks(std::span<const double> values);

/// Upper tail of the standard normal distribution.
double normal_sf(double z);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(F > f) for an F(d1, d2) variable.
double f_distribution_sf(double f, double d1, double d2);

/// Two-sided signed-rank test of zero median. Exact zeros are dropped; the statistic is
/// the positive rank sum W+. Normal approximation with tie and continuity corrections.
/// Throws InsufficientSampleError for fewer than 10 nonzero values.
TestResult wilcoxon_signed_rank(std::span<const double> values);

/// Mean-centred Levene test for equal variances across groups.
/// All-zero deviations give F = 0, p = 1. Throws InsufficientSampleError when there are
/// fewer than two groups or a group has fewer than three values.
TestResult levene_test(const std::vector<std::vector<double>>& groups);

}  // namespace sit
