#include "sit/evaluation.hpp"

#include <fmt/format.h>

#include "sit/errors.hpp"

namespace sit {

double cumulative_return(std::span<const double> returns, std::size_t t, std::size_t p) {
    if (p < 1) throw RangeError("horizon must be at least 1");
    if (t >= returns.size() || p > returns.size() - t) {
        throw RangeError(fmt::format("horizon {} from day {} exceeds the {} available returns", p, t,
                                     returns.size()));
    }
    // (1 + c)(1 + r) - 1 = c + r + c r keeps p = 1 exact.
    double c = returns[t];
    for (std::size_t n = t + 1; n < t + p; ++n) c = c + returns[n] + c * returns[n];
    return c;
}

Sampling parse_sampling(const std::string& name) {
    if (name == "even") return Sampling::even;
    if (name == "contiguous") return Sampling::contiguous;
    if (name == "non_overlapping") return Sampling::non_overlapping;
    throw ConfigError("unknown sampling '" + name + "', expected even, contiguous or non_overlapping");
}

std::string to_string(Sampling sampling) {
    switch (sampling) {
        case Sampling::even: return "even";
        case Sampling::contiguous: return "contiguous";
        case Sampling::non_overlapping: return "non_overlapping";
    }
    return "even";
}

std::vector<std::size_t> sample_starts(std::size_t length, std::size_t p, std::size_t sample_size,
                                       Sampling sampling) {
    if (p < 1) throw RangeError("horizon must be at least 1");
    if (sample_size < 1) throw RangeError("sample size must be at least 1");
    const std::size_t required =
        sampling == Sampling::non_overlapping ? p * sample_size : p + sample_size - 1;
    if (length < required) {
        throw RangeError(fmt::format("{} samples at horizon {} need {} returns, only {} available",
                                     sample_size, p, required, length));
    }
    std::vector<std::size_t> starts(sample_size);
    const std::size_t feasible = length - p + 1;
    for (std::size_t i = 0; i < sample_size; ++i) {
        switch (sampling) {
            case Sampling::even:
                starts[i] = sample_size == 1 ? 0 : i * (feasible - 1) / (sample_size - 1);
                break;
            case Sampling::contiguous:
                starts[i] = i;
                break;
            case Sampling::non_overlapping:
                starts[i] = i * p;
                break;
        }
    }
    return starts;
}

ResidualSeries residual_series(std::span<const double> index_returns,
                               std::span<const double> portfolio_returns, std::size_t p,
                               std::size_t sample_size, Sampling sampling) {
    if (index_returns.size() != portfolio_returns.size()) {
        throw RangeError("index and portfolio return series differ in length");
    }
    ResidualSeries out;
    out.horizon = p;
    out.sample_times = sample_starts(index_returns.size(), p, sample_size, sampling);
    out.values.reserve(sample_size);
    for (auto t : out.sample_times) {
        out.values.push_back(cumulative_return(portfolio_returns, t, p) -
                             cumulative_return(index_returns, t, p));
    }
    return out;
}

ResidualSeries residual_series_all(std::span<const double> index_returns,
                                   std::span<const double> portfolio_returns, std::size_t p) {
    if (p < 1 || index_returns.size() < p) {
        throw RangeError(fmt::format("horizon {} needs at least {} returns, only {} available", p, p,
                                     index_returns.size()));
    }
    return residual_series(index_returns, portfolio_returns, p, index_returns.size() - p + 1,
                           Sampling::contiguous);
}

std::vector<double> residual_curve(std::span<const double> index_returns,
                                   std::span<const double> portfolio_returns) {
    if (index_returns.size() != portfolio_returns.size()) {
        throw RangeError("index and portfolio return series differ in length");
    }
    std::vector<double> curve;
    curve.reserve(index_returns.size());
    double c_index = 0.0;
    double c_port = 0.0;
    for (std::size_t n = 0; n < index_returns.size(); ++n) {
        if (n == 0) {
            c_index = index_returns[0];
            c_port = portfolio_returns[0];
        } else {
            c_index = c_index + index_returns[n] + c_index * index_returns[n];
            c_port = c_port + portfolio_returns[n] + c_port * portfolio_returns[n];
        }
        curve.push_back(c_port - c_index);
    }
    return curve;
}

}  // namespace sit
