#ifndef VCONS_CONSISTENCY_HPP
#define VCONS_CONSISTENCY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcons/model.hpp"
#include "vcons/statespace.hpp"
#include "vcons/transient.hpp"

namespace vcons
{

/// Probability mass on states holding the record in at least `t_target`
/// vehicles.
double consistency_probability(const DistributionVector& x, const StateSpace& space, int t_target);

struct ConsistencyRow
{
    std::string scenario;
    int n = 0;
    int t_target = 0;
    double time_s = 0; ///< kSteadyTime for stationary rows
    double p_cons = 0;
    /// t_target > n: structural zero kept so grids stay rectangular.
    bool target_exceeds_n = false;
};

struct ConsistencyTable
{
    std::vector<ConsistencyRow> rows;
};

/// Stationary consistency on the (N, t) grid. Each N gets its own
/// parameters (arrival rate and n_ave are re-derived), state space and
/// generator. Rows are ordered by (N, t).
ConsistencyTable sweep_steady(const ScenarioParams& base,
                              const ModelOptions& options,
                              std::span<const int> n_range,
                              std::span<const int> t_range,
                              unsigned jobs = 1);

/// Transient consistency on the (N, t, time) grid, ordered by (N, t, time).
ConsistencyTable sweep_transient(const ScenarioParams& base,
                                 const ModelOptions& options,
                                 std::span<const int> n_range,
                                 std::span<const int> t_range,
                                 std::span<const double> times,
                                 double tol = 1e-10,
                                 unsigned jobs = 1);

/// First grid time at which `values` reaches `level`, if any.
std::optional<double> first_time_reaching(std::span<const double> times,
                                          std::span<const double> values,
                                          double level);

} // namespace vcons

#endif
