#ifndef VCONS_TRANSIENT_HPP
#define VCONS_TRANSIENT_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vcons/generator.hpp"
#include "vcons/model.hpp"
#include "vcons/statespace.hpp"

namespace vcons
{

inline constexpr double kSteadyTime = std::numeric_limits<double>::infinity();

/// Probability row vector over state indices at `time_s` (infinity for a
/// stationary law).
struct DistributionVector
{
    Eigen::VectorXd probabilities;
    double time_s = 0;

    double total() const { return probabilities.sum(); }
};

struct TransientSolution
{
    std::vector<double> times;
    std::vector<DistributionVector> distributions;
    double truncation_tolerance = 0;
};

DistributionVector point_mass(const StateSpace& space, State s);

/// X0 implied by the options: `initial_i` holders with j0 at capacity, at
/// the fixed value, or drawn from the truncated-Poisson occupancy law
/// conditioned on j0 >= initial_i.
DistributionVector initial_distribution(const ScenarioParams& params,
                                        const ModelOptions& options,
                                        const StateSpace& space);

/// Truncated-Poisson occupancy law, weights N^j/j! for j = 0..N normalised.
std::vector<double> truncated_poisson(int max_vehicles);

/// Uniformization rate used by the solvers: 1.02 times the fastest exit rate.
double uniformization_rate(const RateMatrix& m);

/// Poisson(mean) probabilities for n = 0..K, where K is the smallest index
/// whose right tail beyond K is below `tol`. Evaluated from the mode outward
/// so a large mean does not underflow the central terms.
std::vector<double> poisson_weights(double mean, double tol);

/// X(t) = x0 exp(A t) at each requested time by uniformization.
TransientSolution transient_distribution(const RateMatrix& m,
                                         const DistributionVector& x0,
                                         std::span<const double> times,
                                         double tol = 1e-10);

/// Classic fixed-step RK4 integration of dX/dt = X A. The step actually used
/// divides t evenly and never exceeds `step`, which itself must be at most
/// 0.1 / uniformization_rate(m).
DistributionVector ode_reference(const RateMatrix& m, const DistributionVector& x0, double t, double step);

/// RK4 over an ascending grid, integrating continuously from 0.
std::vector<DistributionVector> ode_reference(const RateMatrix& m,
                                              const DistributionVector& x0,
                                              std::span<const double> times,
                                              double step);

/// 0, step, 2 step, ... up to `horizon` inclusive (values computed as k*step).
std::vector<double> time_grid(double horizon, double step);

} // namespace vcons

#endif
