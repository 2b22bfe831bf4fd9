#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sit {

/// prod_{n=t}^{t+p-1} (1 + R_n) - 1 with a 0-based start `t`. For p = 1 the result is R_t exactly.
double cumulative_return(std::span<const double> returns, std::size_t t, std::size_t p);

/// How start times are chosen for a residual sample.
enum class Sampling {
    even,             // evenly spaced over every feasible start
    contiguous,       // the first `sample_size` starts
    non_overlapping,  // starts 0, p, 2p, ...
};

Sampling parse_sampling(const std::string& name);
std::string to_string(Sampling sampling);

struct ResidualSeries {
    std::size_t horizon = 0;
    std::vector<double> values;             // portfolio minus index cumulative return
    std::vector<std::size_t> sample_times;  // 0-based start days
};

/// Start days for `sample_size` samples at horizon `p` over `length` days.
/// Throws RangeError reporting the required length when the series is too short.
std::vector<std::size_t> sample_starts(std::size_t length, std::size_t p, std::size_t sample_size,
                                       Sampling sampling);

ResidualSeries residual_series(std::span<const double> index_returns,
                               std::span<const double> portfolio_returns, std::size_t p,
                               std::size_t sample_size, Sampling sampling = Sampling::even);

/// Residuals at every feasible start day.
ResidualSeries residual_series_all(std::span<const double> index_returns,
                                   std::span<const double> portfolio_returns, std::size_t p);

/// Residual eps^p at the first day as a function of p = 1..length.
std::vector<double> residual_curve(std::span<const double> index_returns,
                                   std::span<const double> portfolio_returns);

}  // namespace sit
