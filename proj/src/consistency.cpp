#include "vcons/consistency.hpp"

#include <stdexcept>

#include <fmt/format.h>

#include "vcons/generator.hpp"
#include "vcons/parallel.hpp"
#include "vcons/steady.hpp"

namespace vcons
{

double consistency_probability(const DistributionVector& x, const StateSpace& space, int t_target)
{
    if(t_target < 1 || t_target > space.max_vehicles()) {
        throw std::invalid_argument(
            fmt::format("target {} outside [1, {}]", t_target, space.max_vehicles()));
    }
    if(static_cast<std::size_t>(x.probabilities.size()) != space.size()) {
        throw std::invalid_argument("distribution does not match the state space");
    }
    double p = 0;
    for(std::size_t k = 0; k < space.size(); ++k) {
        if(space[k].holders >= t_target) {
            p += x.probabilities[static_cast<Eigen::Index>(k)];
        }
    }
    return p;
}

namespace
{

void check_ranges(std::span<const int> n_range, std::span<const int> t_range)
{
    if(n_range.empty() || t_range.empty()) {
        throw std::invalid_argument("sweep ranges must be non-empty");
    }
    for(int n : n_range) {
        if(n < 1) {
            throw std::invalid_argument("vehicle counts must be at least 1");
        }
    }
    for(int t : t_range) {
        if(t < 1) {
            throw std::invalid_argument("targets must be at least 1");
        }
    }
}

template<class PerN>
ConsistencyTable sweep(std::span<const int> n_range, unsigned jobs, PerN&& per_n)
{
    std::vector<std::vector<ConsistencyRow>> blocks(n_range.size());
    parallel_for(n_range.size(), jobs, [&](std::size_t k) {
        try {
            blocks[k] = per_n(n_range[k]);
        }
        catch(const SolverError& e) {
            throw SolverError(fmt::format("N={}: {}", n_range[k], e.what()));
        }
    });
    ConsistencyTable table;
    for(auto& block : blocks) {
        table.rows.insert(table.rows.end(), std::make_move_iterator(block.begin()),
                          std::make_move_iterator(block.end()));
    }
    return table;
}

} // namespace

ConsistencyTable sweep_steady(const ScenarioParams& base,
                              const ModelOptions& options,
                              std::span<const int> n_range,
                              std::span<const int> t_range,
                              unsigned jobs)
{
    check_ranges(n_range, t_range);
    return sweep(n_range, jobs, [&](int n) {
        const ScenarioParams params = base.with_max_vehicles(n);
        const StateSpace space(n);
        const RateMatrix a = build_rate_matrix(params, options, space);
        const DistributionVector x0 = initial_distribution(params, options, space);
        Eigen::Index start = 0;
        x0.probabilities.maxCoeff(&start);
        const SteadyState pi = steady_state(a, static_cast<std::size_t>(start));

        std::vector<ConsistencyRow> rows;
        for(int t : t_range) {
            ConsistencyRow row{params.name(), n, t, kSteadyTime, 0.0, t > n};
            if(!row.target_exceeds_n) {
                row.p_cons = consistency_probability(pi.distribution, space, t);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    });
}

ConsistencyTable sweep_transient(const ScenarioParams& base,
                                 const ModelOptions& options,
                                 std::span<const int> n_range,
                                 std::span<const int> t_range,
                                 std::span<const double> times,
                                 double tol,
                                 unsigned jobs)
{
    check_ranges(n_range, t_range);
    return sweep(n_range, jobs, [&](int n) {
        const ScenarioParams params = base.with_max_vehicles(n);
        const StateSpace space(n);
        const RateMatrix a = build_rate_matrix(params, options, space);
        const DistributionVector x0 = initial_distribution(params, options, space);
        const TransientSolution sol = transient_distribution(a, x0, times, tol);

        std::vector<ConsistencyRow> rows;
        rows.reserve(t_range.size() * times.size());
        for(int t : t_range) {
            for(const DistributionVector& x : sol.distributions) {
                ConsistencyRow row{params.name(), n, t, x.time_s, 0.0, t > n};
                if(!row.target_exceeds_n) {
                    row.p_cons = consistency_probability(x, space, t);
                }
                rows.push_back(std::move(row));
            }
        }
        return rows;
    });
}

std::optional<double> first_time_reaching(std::span<const double> times,
                                          std::span<const double> values,
                                          double level)
{
    if(times.size() != values.size()) {
        throw std::invalid_argument("times and values differ in length");
    }
    for(std::size_t k = 0; k < times.size(); ++k) {
        if(values[k] >= level) {
            return times[k];
        }
    }
    return std::nullopt;
}

} // namespace vcons
