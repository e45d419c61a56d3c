#ifndef VCONS_ORACLE_HPP
#define VCONS_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vcons/model.hpp"

namespace vcons
{

/// Monte Carlo estimate of P(holders >= t_target) on a time grid.
struct SimulationEstimate
{
    int t_target = 0;
    std::vector<double> times;
    std::vector<double> p_hat;
    std::vector<double> half_width_95;
    std::size_t n_runs = 0;
    std::uint64_t seed = 0;
};

/// Event-by-event sampling of the segment: exponential holding times with
/// the state's total outflow, the event picked proportionally to its rate.
/// A refresh event draws the coverage count (floor or ceil of n_ave, capped
/// by the uncovered occupants) and then a binomial number of successful
/// receptions; zero receptions leave the state unchanged.
///
/// Works from the scenario directly, not from the rate matrix, so it checks
/// the generator instead of sharing its construction. Run r draws from a
/// stream keyed by (seed, r): results do not depend on `jobs`.
std::vector<SimulationEstimate> simulate_runs(const ScenarioParams& params,
                                              const ModelOptions& options,
                                              std::span<const double> times,
                                              std::span<const int> t_targets,
                                              std::size_t n_runs,
                                              std::uint64_t seed,
                                              unsigned jobs = 1);

SimulationEstimate simulate_runs(const ScenarioParams& params,
                                 const ModelOptions& options,
                                 std::span<const double> times,
                                 int t_target,
                                 std::size_t n_runs,
                                 std::uint64_t seed,
                                 unsigned jobs = 1);

/// Fraction of time a single long path spends at each occupancy j = 0..N.
std::vector<double> occupancy_time_average(const ScenarioParams& params,
                                           const ModelOptions& options,
                                           double duration_s,
                                           std::uint64_t seed);

struct ComparisonPoint
{
    double time_s = 0;
    double p_hat = 0;
    double half_width_95 = 0;
    double p_analytic = 0;
    /// (p_hat - p_analytic) / sqrt(p_analytic (1 - p_analytic) / n_runs)
    double z = 0;
    /// Both the estimate and the analytic value sit within 5/n_runs of 0 or
    /// 1: the normal approximation is not trusted and the point never
    /// raises a flag.
    bool exempt = false;
};

struct ComparisonCurve
{
    int t_target = 0;
    std::vector<ComparisonPoint> points;
};

struct ComparisonReport
{
    int n = 0;
    std::size_t n_runs = 0;
    std::uint64_t seed = 0;
    std::vector<ComparisonCurve> curves;
    double max_abs_diff = 0;
    std::size_t points = 0;
    std::size_t beyond_3_sigma = 0;
    /// Non-exempt points with |z| > 4.
    std::size_t flags = 0;
};

ComparisonReport estimate_vs_analytic(const ScenarioParams& params,
                                      const ModelOptions& options,
                                      std::span<const int> t_targets,
                                      std::span<const double> times,
                                      std::size_t n_runs,
                                      std::uint64_t seed,
                                      unsigned jobs = 1);

} // namespace vcons

#endif
