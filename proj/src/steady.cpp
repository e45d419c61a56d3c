#include "vcons/steady.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <fmt/format.h>

namespace vcons
{

namespace
{

double stationarity_residual(const RateMatrix& m, const Eigen::VectorXd& pi)
{
    return (m.matrix().transpose() * pi).cwiseAbs().maxCoeff();
}

Eigen::VectorXd solve_class(const RateMatrix& m, const std::vector<std::size_t>& members)
{
    const auto n = static_cast<Eigen::Index>(members.size());
    std::vector<Eigen::Index> local(m.dimension(), -1);
    for(Eigen::Index k = 0; k < n; ++k) {
        local[members[k]] = k;
    }

    // Rows of the transposed sub-generator: system(c, r) = A(r, c).
    Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n, n);
    const SparseRows& a = m.matrix();
    for(Eigen::Index r = 0; r < n; ++r) {
        for(SparseRows::InnerIterator it(a, static_cast<Eigen::Index>(members[r])); it; ++it) {
            const Eigen::Index c = local[static_cast<std::size_t>(it.col())];
            if(c >= 0) {
                system(c, r) = it.value();
            }
        }
    }
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if(!lu.isInvertible()) {
        throw SolverError(fmt::format("stationary system is singular (rank {} of {})", lu.rank(), n));
    }
    const Eigen::VectorXd sub = lu.solve(rhs);

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dimension()));
    for(Eigen::Index k = 0; k < n; ++k) {
        pi[static_cast<Eigen::Index>(members[k])] = sub[k];
    }
    return pi;
}

void tidy(Eigen::VectorXd& pi)
{
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
}

} // namespace

SteadyState steady_state(const RateMatrix& m, std::optional<std::size_t> start)
{
    const auto classes = recurrent_classes(m);
    SteadyState out;
    out.recurrent_class_count = classes.size();
    out.unique = classes.size() == 1;

    std::vector<std::size_t> members;
    if(out.unique) {
        // A single closed class keeps the nullity at one, so the full system
        // is solvable and transient states come out as zero.
        members.resize(m.dimension());
        for(std::size_t k = 0; k < members.size(); ++k) {
            members[k] = k;
        }
    }
    else {
        const auto seen = reachable_from(m, start.value_or(0));
        auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return seen[c.front()]; });
        members = *it;
    }

    Eigen::VectorXd pi = solve_class(m, members);
    tidy(pi);
    out.residual = stationarity_residual(m, pi);
    const double limit = 1e-10 * m.norm_inf();
    if(!(out.residual <= limit)) {
        throw SolverError(fmt::format("stationary solve residual {:.3e} exceeds {:.3e}", out.residual, limit));
    }
    out.distribution = {std::move(pi), kSteadyTime};
    return out;
}

SteadyState steady_state_power(const RateMatrix& m, const DistributionVector& x0, double tol, std::size_t max_sweeps)
{
    const double rate = uniformization_rate(m);
    Eigen::VectorXd v = x0.probabilities;
    for(std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        Eigen::VectorXd next = v + (m.matrix().transpose() * v) / rate;
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if(change < tol) {
            break;
        }
    }
    tidy(v);
    SteadyState out;
    out.residual = stationarity_residual(m, v);
    out.recurrent_class_count = recurrent_classes(m).size();
    out.unique = out.recurrent_class_count == 1;
    out.distribution = {std::move(v), kSteadyTime};
    return out;
}

double final_value_check(const RateMatrix& m, const DistributionVector& x0, double horizon)
{
    if(!(horizon >= 0)) {
        throw std::invalid_argument("horizon must be non-negative");
    }
    Eigen::Index start = 0;
    x0.probabilities.maxCoeff(&start);
    const SteadyState pi = steady_state(m, static_cast<std::size_t>(start));
    const double grid[] = {horizon};
    const auto x = transient_distribution(m, x0, grid);
    return (x.distributions.front().probabilities - pi.distribution.probabilities).cwiseAbs().maxCoeff();
}

} // namespace vcons
