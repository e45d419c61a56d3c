#ifndef VCONS_STEADY_HPP
#define VCONS_STEADY_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "vcons/generator.hpp"
#include "vcons/transient.hpp"

namespace vcons
{

/// The linear system for the stationary law was numerically defective.
class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct SteadyState
{
    DistributionVector distribution;
    /// ||pi A||_inf
    double residual = 0;
    std::size_t recurrent_class_count = 0;
    /// False when several closed classes exist; `distribution` then lives on
    /// the class reached from the start state.
    bool unique = true;
};

/// Solves pi A = 0, sum(pi) = 1 with a dense full-pivot LU after replacing
/// one balance equation by the normalisation row.
///
/// With more than one closed class the chain has no unique stationary law;
/// the class reachable from `start` (default: state 0) is solved and the
/// result is flagged non-unique. Throws SolverError when the achieved
/// residual exceeds 1e-10 * ||A||_inf.
SteadyState steady_state(const RateMatrix& m, std::optional<std::size_t> start = std::nullopt);

/// Debug fallback: power iteration on the uniformized kernel until the
/// max-abs change per sweep drops below `tol`.
SteadyState steady_state_power(const RateMatrix& m,
                               const DistributionVector& x0,
                               double tol = 1e-14,
                               std::size_t max_sweeps = 10'000'000);

/// ||X(horizon) - pi||_inf where pi is the stationary law of the class
/// reached from x0's support.
double final_value_check(const RateMatrix& m, const DistributionVector& x0, double horizon);

} // namespace vcons

#endif
