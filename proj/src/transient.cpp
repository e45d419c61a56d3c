#include "vcons/transient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vcons
{

namespace
{

constexpr double kNormalizationTol = 1e-8;

void require_normalized(const DistributionVector& x0, std::size_t dim)
{
    if(static_cast<std::size_t>(x0.probabilities.size()) != dim) {
        throw std::invalid_argument("initial distribution has the wrong dimension");
    }
    if(std::abs(x0.total() - 1.0) > kNormalizationTol) {
        throw std::invalid_argument("initial distribution is not normalized");
    }
}

void require_ascending(std::span<const double> times)
{
    if(times.empty()) {
        throw std::invalid_argument("time grid is empty");
    }
    if(times.front() < 0) {
        throw std::invalid_argument("times must be non-negative");
    }
    for(std::size_t k = 1; k < times.size(); ++k) {
        if(!(times[k] > times[k - 1])) {
            throw std::invalid_argument("times must be strictly increasing");
        }
    }
}

void clamp_negative(Eigen::VectorXd& v)
{
    v = v.cwiseMax(0.0);
}

// v <- v A, i.e. A^T v for a column representation.
Eigen::VectorXd left_multiply(const SparseRows& a, const Eigen::VectorXd& v)
{
    return a.transpose() * v;
}

} // namespace

DistributionVector point_mass(const StateSpace& space, State s)
{
    DistributionVector x{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size())), 0.0};
    x.probabilities[static_cast<Eigen::Index>(space.index_of(s))] = 1.0;
    return x;
}

std::vector<double> truncated_poisson(int max_vehicles)
{
    // Ratios w_j / w_{j-1} = N / j keep every term finite for any N.
    std::vector<double> w(static_cast<std::size_t>(max_vehicles) + 1);
    const int mode = max_vehicles;
    w[mode] = 1.0;
    for(int j = mode; j > 0; --j) {
        w[j - 1] = w[j] * j / max_vehicles;
    }
    double total = 0;
    for(double x : w) {
        total += x;
    }
    for(double& x : w) {
        x /= total;
    }
    return w;
}

DistributionVector initial_distribution(const ScenarioParams& params,
                                        const ModelOptions& options,
                                        const StateSpace& space)
{
    const int n = params.max_vehicles();
    validate_options(options, n);
    const int i0 = options.initial_i;

    if(std::holds_alternative<AtCapacity>(options.initial_j)) {
        return point_mass(space, {i0, n});
    }
    if(const auto* fixed = std::get_if<FixedOccupancy>(&options.initial_j)) {
        return point_mass(space, {i0, fixed->j});
    }

    const auto occupancy = truncated_poisson(n);
    double admissible = 0;
    for(int j = i0; j <= n; ++j) {
        admissible += occupancy[j];
    }
    DistributionVector x{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size())), 0.0};
    for(int j = i0; j <= n; ++j) {
        x.probabilities[static_cast<Eigen::Index>(space.index_of({i0, j}))] = occupancy[j] / admissible;
    }
    return x;
}

double uniformization_rate(const RateMatrix& m)
{
    const double fastest = m.max_exit_rate();
    return fastest > 0 ? 1.02 * fastest : 1.0;
}

std::vector<double> poisson_weights(double mean, double tol)
{
    if(mean < 0 || !std::isfinite(mean)) {
        throw std::invalid_argument("Poisson mean must be finite and non-negative");
    }
    if(mean == 0) {
        return {1.0};
    }

    const auto mode = static_cast<std::size_t>(std::floor(mean));
    std::vector<double> w(mode + 1);
    w[mode] = std::exp(-mean + static_cast<double>(mode) * std::log(mean) - std::lgamma(mode + 1.0));
    for(std::size_t n = mode; n > 0; --n) {
        w[n - 1] = w[n] * static_cast<double>(n) / mean;
    }

    // Extend right until the remaining tail is negligible next to tol. Past
    // the mode the ratio mean/(n+1) is below one and shrinking, so the tail
    // beyond n is at most w_n * r / (1 - r).
    for(std::size_t n = mode;; ++n) {
        const double r = mean / static_cast<double>(n + 2);
        if(n > mode && r < 1 && w[n] * r / (1 - r) < tol * 1e-3) {
            break;
        }
        w.push_back(w[n] * mean / static_cast<double>(n + 1));
    }

    double tail = 0;
    std::size_t cut = w.size() - 1;
    for(std::size_t n = w.size(); n-- > 0;) {
        // `tail` is the mass strictly beyond n.
        if(tail >= tol) {
            break;
        }
        cut = n;
        tail += w[n];
    }
    w.resize(cut + 1);
    return w;
}

TransientSolution transient_distribution(const RateMatrix& m,
                                         const DistributionVector& x0,
                                         std::span<const double> times,
                                         double tol)
{
    if(!(tol > 0 && tol <= 1e-3)) {
        throw std::invalid_argument("truncation tolerance must lie in (0, 1e-3]");
    }
    require_normalized(x0, m.dimension());
    require_ascending(times);

    const double rate = uniformization_rate(m);
    const SparseRows& a = m.matrix();

    std::vector<std::vector<double>> weights;
    weights.reserve(times.size());
    std::size_t terms = 0;
    for(double t : times) {
        weights.push_back(poisson_weights(rate * t, tol));
        terms = std::max(terms, weights.back().size());
    }

    const auto dim = static_cast<Eigen::Index>(m.dimension());
    std::vector<Eigen::VectorXd> acc(times.size(), Eigen::VectorXd::Zero(dim));
    Eigen::VectorXd v = x0.probabilities;
    for(std::size_t n = 0; n < terms; ++n) {
        for(std::size_t k = 0; k < times.size(); ++k) {
            if(n < weights[k].size() && weights[k][n] > 0) {
                acc[k].noalias() += weights[k][n] * v;
            }
        }
        if(n + 1 < terms) {
            v += left_multiply(a, v) / rate;
        }
    }

    TransientSolution out;
    out.truncation_tolerance = tol;
    out.times.assign(times.begin(), times.end());
    out.distributions.reserve(times.size());
    for(std::size_t k = 0; k < times.size(); ++k) {
        if(times[k] == 0) {
            out.distributions.push_back({x0.probabilities, 0.0});
            continue;
        }
        clamp_negative(acc[k]);
        out.distributions.push_back({std::move(acc[k]), times[k]});
    }
    return out;
}

namespace
{

void check_step(const RateMatrix& m, double step)
{
    if(!(step > 0) || step > 0.1 / uniformization_rate(m)) {
        throw std::invalid_argument("RK4 step must be positive and at most 0.1 / uniformization rate");
    }
}

void rk4_advance(const SparseRows& a, Eigen::VectorXd& x, double span, double max_step)
{
    if(span <= 0) {
        return;
    }
    const auto steps = static_cast<long>(std::ceil(span / max_step - 1e-9));
    const double h = span / static_cast<double>(steps);
    for(long s = 0; s < steps; ++s) {
        const Eigen::VectorXd k1 = left_multiply(a, x);
        const Eigen::VectorXd k2 = left_multiply(a, x + 0.5 * h * k1);
        const Eigen::VectorXd k3 = left_multiply(a, x + 0.5 * h * k2);
        const Eigen::VectorXd k4 = left_multiply(a, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

} // namespace

DistributionVector ode_reference(const RateMatrix& m, const DistributionVector& x0, double t, double step)
{
    const double grid[] = {t};
    return std::move(ode_reference(m, x0, grid, step).front());
}

std::vector<DistributionVector> ode_reference(const RateMatrix& m,
                                              const DistributionVector& x0,
                                              std::span<const double> times,
                                              double step)
{
    check_step(m, step);
    require_normalized(x0, m.dimension());
    require_ascending(times);

    std::vector<DistributionVector> out;
    out.reserve(times.size());
    Eigen::VectorXd x = x0.probabilities;
    double now = 0;
    for(double t : times) {
        rk4_advance(m.matrix(), x, t - now, step);
        now = t;
        out.push_back({x, t});
    }
    return out;
}

std::vector<double> time_grid(double horizon, double step)
{
    if(!(horizon >= 0) || !(step > 0)) {
        throw std::invalid_argument("time grid needs horizon >= 0 and step > 0");
    }
    if(horizon > 0 && step > horizon) {
        throw std::invalid_argument("step exceeds horizon");
    }
    const auto count = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
    std::vector<double> grid(count + 1);
    for(std::size_t k = 0; k <= count; ++k) {
        grid[k] = static_cast<double>(k) * step;
    }
    return grid;
}

} // namespace vcons
