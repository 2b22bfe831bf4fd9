#include "sit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "sit/errors.hpp"

namespace sit {

std::string to_string(TestName name) {
    return name == TestName::wilcoxon_signed_rank ? "wilcoxon_signed_rank" : "levene";
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double mu = mean(values);
    double s = 0.0;
    for (double v : values) s += (v - mu) * (v - mu);
    return s / static_cast<double>(values.size() - 1);
}

std::vector<double> midranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw ParameterError("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
    if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

TestResult wilcoxon_signed_rank(std::span<const double> values) {
    std::vector<double> nonzero;
    for (double v : values) {
        if (v != 0.0) nonzero.push_back(v);
    }
    const std::size_t n = nonzero.size();
    if (n < 10) {
        throw InsufficientSampleError(
            fmt::format("signed-rank test needs at least 10 nonzero values, got {}", n));
    }
    std::vector<double> magnitude(n);
    for (std::size_t i = 0; i < n; ++i) magnitude[i] = std::abs(nonzero[i]);
    const auto ranks = midranks(magnitude);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (nonzero[i] > 0.0) w_plus += ranks[i];
    }

    // Tie correction sum(t^3 - t) over groups of equal magnitude.
    std::vector<double> sorted = magnitude;
    std::sort(sorted.begin(), sorted.end());
    double ties = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }

    const double nn = static_cast<double>(n);
    const double expected = nn * (nn + 1.0) / 4.0;
    const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - ties / 48.0;
    const double corrected = std::max(std::abs(w_plus - expected) - 0.5, 0.0);
    const double z = corrected / std::sqrt(variance);

    TestResult result;
    result.test_name = TestName::wilcoxon_signed_rank;
    result.statistic = w_plus;
    result.p_value = std::min(1.0, 2.0 * normal_sf(z));
    result.rejected_at_5pct = result.p_value < kSignificance;
    return result;
}

TestResult levene_test(const std::vector<std::vector<double>>& groups) {
    const std::size_t k = groups.size();
    if (k < 2) throw InsufficientSampleError("Levene test needs at least two groups");
    std::size_t total = 0;
    for (std::size_t g = 0; g < k; ++g) {
        if (groups[g].size() < 3) {
            throw InsufficientSampleError(
                fmt::format("Levene test group {} has {} values, need at least 3", g + 1, groups[g].size()));
        }
        total += groups[g].size();
    }

    std::vector<std::vector<double>> deviations(k);
    std::vector<double> group_means(k);
    double grand_sum = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        const double mu = mean(groups[g]);
        for (double v : groups[g]) deviations[g].push_back(std::abs(v - mu));
        group_means[g] = mean(deviations[g]);
        for (double z : deviations[g]) grand_sum += z;
    }
    const double grand_mean = grand_sum / static_cast<double>(total);

    const bool equal_means = std::all_of(group_means.begin(), group_means.end(),
                                         [&](double m) { return m == group_means.front(); });
    double between = 0.0;
    double within = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        const double diff = equal_means ? 0.0 : group_means[g] - grand_mean;
        between += static_cast<double>(deviations[g].size()) * diff * diff;
        for (double z : deviations[g]) within += (z - group_means[g]) * (z - group_means[g]);
    }

    const double d1 = static_cast<double>(k - 1);
    const double d2 = static_cast<double>(total - k);
    TestResult result;
    result.test_name = TestName::levene;
    if (within == 0.0) {
        result.statistic = between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        result.statistic = (d2 / d1) * between / within;
    }
    result.p_value = f_distribution_sf(result.statistic, d1, d2);
    result.rejected_at_5pct = result.p_value < kSignificance;
    return result;
}

}  // namespace sit
