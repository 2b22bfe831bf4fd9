#include "sit/selection.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "sit/csv.hpp"
#include "sit/errors.hpp"

namespace sit {

void SelectionParams::validate() const {
    if (n > m) throw ParameterError(fmt::format("N <= M violated: N={} > M={}", n, m));
    if (m > h) throw ParameterError(fmt::format("M <= H violated: M={} > H={}", m, h));
    if (h > k) throw ParameterError(fmt::format("H <= K violated: H={} > K={}", h, k));
    if (k == 0) throw ParameterError("K must be at least 1");
    if (!(alpha >= 0.0)) throw ParameterError(fmt::format("alpha >= 0 violated: alpha={}", alpha));
    if (!(beta >= 0.0)) throw ParameterError(fmt::format("beta >= 0 violated: beta={}", beta));
}

std::size_t Selection::count() const {
    return static_cast<std::size_t>(std::count(x.begin(), x.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Selection::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i]) out.push_back(i);
    }
    return out;
}

Selection Selection::from_indices(std::size_t k, std::span<const std::size_t> indices) {
    Selection s;
    s.x.assign(k, 0);
    for (auto i : indices) {
        if (i >= k) throw FeasibilityError(fmt::format("index {} outside universe of {}", i, k));
        s.x[i] = 1;
    }
    return s;
}

bool lexicographically_less(const Selection& a, const Selection& b) {
    const auto ia = a.indices();
    const auto ib = b.indices();
    return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

SelectionProblem::SelectionProblem(DistanceMatrix d, const SelectionParams& params)
    : params_(params), d_(std::move(d)) {
    params_.validate();
    const auto k = static_cast<Eigen::Index>(params_.k);
    if (d_.d.rows() < k || d_.d.cols() < k || d_.mc_rank_order.size() < params_.k) {
        throw ParameterError(fmt::format("distance matrix of dimension {} is smaller than K={}",
                                         d_.d.rows(), params_.k));
    }
    if (d_.d.rows() != k) {
        d_.d = d_.d.topLeftCorner(k, k).eval();
        d_.mc_rank_order.resize(params_.k);
    }
    row_sums_.assign(params_.k, 0.0);
    for (Eigen::Index i = 0; i < k; ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) sum += d_.d(i, j);
        row_sums_[static_cast<std::size_t>(i)] = sum;
    }
}

Selection SelectionProblem::top_selection() const {
    Selection s;
    s.x.assign(params_.k, 0);
    std::fill(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(params_.m), std::uint8_t{1});
    return s;
}

SelectionProblem build_problem(const DistanceMatrix& d, const SelectionParams& params) {
    return SelectionProblem(d, params);
}

namespace {

std::string feasibility_violation(const SelectionProblem& problem, const Selection& sel) {
    const auto& p = problem.params();
    if (sel.size() != p.k) return fmt::format("selection has length {}, expected K={}", sel.size(), p.k);
    for (std::size_t i = 0; i < p.k; ++i) {
        if (sel.x[i] > 1) return fmt::format("x[{}]={} is not binary", i, sel.x[i]);
    }
    for (std::size_t i = 0; i < p.n; ++i) {
        if (!sel.x[i]) return fmt::format("forced asset at rank {} is not selected", i + 1);
    }
    for (std::size_t i = p.h; i < p.k; ++i) {
        if (sel.x[i]) return fmt::format("asset at rank {} lies beyond H={} but is selected", i + 1, p.h);
    }
    const auto c = sel.count();
    if (c != p.m) return fmt::format("cardinality {} != M={}", c, p.m);
    return {};
}

}  // namespace

void check_feasible(const SelectionProblem& problem, const Selection& sel) {
    const auto why = feasibility_violation(problem, sel);
    if (!why.empty()) throw FeasibilityError("infeasible selection: " + why);
}

bool is_feasible(const SelectionProblem& problem, const Selection& sel) {
    return feasibility_violation(problem, sel).empty();
}

double objective(const SelectionProblem& problem, const Selection& sel) {
    check_feasible(problem, sel);
    const auto idx = sel.indices();
    const auto& rs = problem.row_sums();
    double linear = 0.0;
    double quadratic = 0.0;
    for (auto i : idx) {
        linear += rs[i];
        for (auto j : idx) quadratic += problem.distance(i, j);
    }
    const auto& p = problem.params();
    return p.beta * linear - 0.5 * p.alpha * quadratic;
}

double objective_delta_swap(const SelectionProblem& problem, const Selection& sel,
                            std::size_t out_idx, std::size_t in_idx) {
    if (!problem.is_free(out_idx) || !problem.is_free(in_idx)) {
        throw MoveError(fmt::format("swap ({} out, {} in) touches an index outside the free range [{}, {})",
                                    out_idx, in_idx, problem.free_begin(), problem.free_end()));
    }
    if (sel.size() != problem.size() || !sel.contains(out_idx) || sel.contains(in_idx)) {
        throw MoveError(fmt::format("swap requires asset {} selected and asset {} unselected",
                                    out_idx, in_idx));
    }
    double c_in = 0.0;
    double c_out = 0.0;
    for (std::size_t j = 0; j < sel.size(); ++j) {
        if (!sel.x[j]) continue;
        c_in += problem.distance(in_idx, j);
        c_out += problem.distance(out_idx, j);
    }
    const auto& p = problem.params();
    const auto& rs = problem.row_sums();
    return p.beta * (rs[in_idx] - rs[out_idx]) -
           p.alpha * (c_in - c_out - problem.distance(out_idx, in_idx));
}

void write_instance(const SelectionProblem& problem, std::ostream& out) {
    const auto& p = problem.params();
    out << fmt::format("{} {} {} {} {} {}\n", p.k, p.h, p.n, p.m, csv::format_double(p.alpha),
                       csv::format_double(p.beta));
    for (std::size_t i = 0; i < p.k; ++i) {
        for (std::size_t j = 0; j < p.k; ++j) {
            out << (j ? " " : "") << csv::format_double(problem.distance(i, j));
        }
        out << '\n';
    }
}

void write_instance(const SelectionProblem& problem, const std::filesystem::path& path) {
    std::ostringstream buffer;
    write_instance(problem, buffer);
    csv::write_file_atomic(path, buffer.str());
}

SelectionProblem read_instance(std::istream& in) {
    SelectionParams p;
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty instance");
    {
        std::istringstream head(line);
        if (!(head >> p.k >> p.h >> p.n >> p.m >> p.alpha >> p.beta)) {
            throw ParseError(1, "expected 'K H N M alpha beta'");
        }
    }
    DistanceMatrix d;
    const auto k = static_cast<Eigen::Index>(p.k);
    d.d.resize(k, k);
    for (std::size_t i = 0; i < p.k; ++i) {
        d.mc_rank_order.push_back(std::to_string(i + 1));
        if (!std::getline(in, line)) throw ParseError(i + 2, "missing distance row");
        std::istringstream row(line);
        for (std::size_t j = 0; j < p.k; ++j) {
            double v = 0.0;
            if (!(row >> v)) throw ParseError(i + 2, fmt::format("expected {} distances", p.k));
            d.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    return SelectionProblem(std::move(d), p);
}

SelectionProblem read_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open instance '" + path.string() + "'");
    return read_instance(in);
}

}  // namespace sit
