#include "vcons/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vcons/consistency.hpp"
#include "vcons/generator.hpp"
#include "vcons/parallel.hpp"
#include "vcons/statespace.hpp"
#include "vcons/transient.hpp"

namespace vcons
{

namespace
{

constexpr std::size_t kRunsPerBlock = 1024;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class RunStream
{
public:
    RunStream(std::uint64_t seed, std::uint64_t run) : m_engine(splitmix64(splitmix64(seed) ^ run)) {}

    /// Uniform on [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    std::mt19937_64 m_engine;
};

/// Binomial(n, q) by sequential inversion of the pmf.
int sample_binomial(int n, double q, RunStream& rng)
{
    if(n == 0 || q <= 0) {
        return 0;
    }
    if(q >= 1) {
        return n;
    }
    const double odds = q / (1 - q);
    double pmf = std::pow(1 - q, n);
    double cdf = pmf;
    const double u = rng.uniform();
    int k = 0;
    while(u >= cdf && k < n) {
        pmf *= odds * (n - k) / (k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

int sample_initial_occupancy(const ScenarioParams& params, const ModelOptions& options,
                             const std::vector<double>& occupancy, RunStream& rng)
{
    if(std::holds_alternative<AtCapacity>(options.initial_j)) {
        return params.max_vehicles();
    }
    if(const auto* fixed = std::get_if<FixedOccupancy>(&options.initial_j)) {
        return fixed->j;
    }
    const int n = params.max_vehicles();
    double admissible = 0;
    for(int j = options.initial_i; j <= n; ++j) {
        admissible += occupancy[j];
    }
    const double u = rng.uniform() * admissible;
    double cdf = 0;
    for(int j = options.initial_i; j < n; ++j) {
        cdf += occupancy[j];
        if(u < cdf) {
            return j;
        }
    }
    return n;
}

struct Segment
{
    int holders;
    int occupants;
};

class Trajectory
{
public:
    Trajectory(const ScenarioParams& params, const ModelOptions& options)
        : m_n(params.max_vehicles())
        , m_arrival(params.arrival_rate())
        , m_departure(params.departure_rate())
        , m_refresh(1.0 / params.refresh_period())
        , m_reach_lo(std::floor(params.n_ave()))
        , m_reach_hi(std::ceil(params.n_ave()))
        , m_p1(params.p1())
        , m_success(1.0 - params.p_fail())
        , m_source(options.source_always_transmits)
    {
    }

    /// Samples one path and reports holders at each grid time via record(g, holders).
    template<class Record>
    void run(Segment s, std::span<const double> times, RunStream& rng, Record&& record) const
    {
        double now = 0;
        std::size_t g = 0;
        while(g < times.size()) {
            const double total = total_rate(s);
            const double next = now + rng.exponential(total);
            for(; g < times.size() && times[g] < next; ++g) {
                record(g, s.holders);
            }
            if(g == times.size()) {
                return;
            }
            now = next;
            jump(s, total, rng);
        }
    }

    /// Calls dwell(segment, seconds) for every sojourn up to `duration`.
    template<class Dwell>
    void run_for(Segment s, double duration, RunStream& rng, Dwell&& dwell) const
    {
        double now = 0;
        while(now < duration) {
            const double total = total_rate(s);
            const double next = std::min(duration, now + rng.exponential(total));
            dwell(s, next - now);
            now = next;
            if(now < duration) {
                jump(s, total, rng);
            }
        }
    }

private:
    double total_rate(const Segment& s) const
    {
        const double arrival = s.occupants < m_n ? m_arrival : 0.0;
        const double uncovered = (s.occupants - s.holders) * m_departure;
        const double covered = s.holders * m_departure;
        const double refresh = (s.holders > 0 || m_source) ? m_refresh : 0.0;
        return arrival + uncovered + covered + refresh;
    }

    void jump(Segment& s, double total, RunStream& rng) const
    {
        const double arrival = s.occupants < m_n ? m_arrival : 0.0;
        const double uncovered = (s.occupants - s.holders) * m_departure;
        const double covered = s.holders * m_departure;
        double pick = rng.uniform() * total;
        if((pick -= arrival) < 0) {
            ++s.occupants;
        }
        else if((pick -= uncovered) < 0) {
            --s.occupants;
        }
        else if((pick -= covered) < 0) {
            --s.holders;
            --s.occupants;
        }
        else if(s.holders > 0 || m_source) {
            const double reach = rng.uniform() < m_p1 ? m_reach_lo : m_reach_hi;
            const int free = s.occupants - s.holders;
            const int trials = reach >= free ? free : static_cast<int>(reach);
            s.holders += sample_binomial(trials, m_success, rng);
        }
    }

    int m_n;
    double m_arrival;
    double m_departure;
    double m_refresh;
    double m_reach_lo;
    double m_reach_hi;
    double m_p1;
    double m_success;
    bool m_source;
};

void require_grid(std::span<const double> times)
{
    if(times.empty()) {
        throw std::invalid_argument("time grid is empty");
    }
    for(std::size_t k = 1; k < times.size(); ++k) {
        if(!(times[k] > times[k - 1])) {
            throw std::invalid_argument("times must be strictly increasing");
        }
    }
    if(times.front() < 0) {
        throw std::invalid_argument("times must be non-negative");
    }
}

} // namespace

std::vector<SimulationEstimate> simulate_runs(const ScenarioParams& params,
                                              const ModelOptions& options,
                                              std::span<const double> times,
                                              std::span<const int> t_targets,
                                              std::size_t n_runs,
                                              std::uint64_t seed,
                                              unsigned jobs)
{
    if(n_runs < 1) {
        throw std::invalid_argument("n_runs must be at least 1");
    }
    for(int t : t_targets) {
        if(t < 1 || t > params.max_vehicles()) {
            throw std::invalid_argument("target must satisfy 1 <= t <= N");
        }
    }
    require_grid(times);
    validate_options(options, params.max_vehicles());

    const Trajectory trajectory(params, options);
    const auto occupancy = truncated_poisson(params.max_vehicles());
    const std::size_t cells = t_targets.size() * times.size();
    const std::size_t blocks = (n_runs + kRunsPerBlock - 1) / kRunsPerBlock;
    std::vector<std::vector<std::uint64_t>> hits(blocks);

    parallel_for(blocks, jobs, [&](std::size_t b) {
        std::vector<std::uint64_t> local(cells, 0);
        const std::size_t end = std::min(n_runs, (b + 1) * kRunsPerBlock);
        for(std::size_t r = b * kRunsPerBlock; r < end; ++r) {
            RunStream rng(seed, r);
            const int j0 = sample_initial_occupancy(params, options, occupancy, rng);
            trajectory.run({options.initial_i, j0}, times, rng, [&](std::size_t g, int holders) {
                for(std::size_t k = 0; k < t_targets.size(); ++k) {
                    if(holders >= t_targets[k]) {
                        ++local[k * times.size() + g];
                    }
                }
            });
        }
        hits[b] = std::move(local);
    });

    std::vector<std::uint64_t> total(cells, 0);
    for(const auto& block : hits) {
        for(std::size_t c = 0; c < cells; ++c) {
            total[c] += block[c];
        }
    }

    std::vector<SimulationEstimate> out;
    const double n = static_cast<double>(n_runs);
    for(std::size_t k = 0; k < t_targets.size(); ++k) {
        SimulationEstimate est;
        est.t_target = t_targets[k];
        est.times.assign(times.begin(), times.end());
        est.n_runs = n_runs;
        est.seed = seed;
        for(std::size_t g = 0; g < times.size(); ++g) {
            const double p = static_cast<double>(total[k * times.size() + g]) / n;
            est.p_hat.push_back(p);
            est.half_width_95.push_back(1.96 * std::sqrt(p * (1 - p) / n));
        }
        out.push_back(std::move(est));
    }
    return out;
}

SimulationEstimate simulate_runs(const ScenarioParams& params,
                                 const ModelOptions& options,
                                 std::span<const double> times,
                                 int t_target,
                                 std::size_t n_runs,
                                 std::uint64_t seed,
                                 unsigned jobs)
{
    const int targets[] = {t_target};
    return std::move(simulate_runs(params, options, times, targets, n_runs, seed, jobs).front());
}

std::vector<double> occupancy_time_average(const ScenarioParams& params,
                                           const ModelOptions& options,
                                           double duration_s,
                                           std::uint64_t seed)
{
    if(!(duration_s > 0)) {
        throw std::invalid_argument("duration must be positive");
    }
    validate_options(options, params.max_vehicles());
    const Trajectory trajectory(params, options);
    RunStream rng(seed, 0);
    const int j0 = sample_initial_occupancy(params, options, truncated_poisson(params.max_vehicles()), rng);
    std::vector<double> time_at(static_cast<std::size_t>(params.max_vehicles()) + 1, 0.0);
    trajectory.run_for({options.initial_i, j0}, duration_s, rng,
                       [&](const Segment& s, double dt) { time_at[static_cast<std::size_t>(s.occupants)] += dt; });
    for(double& t : time_at) {
        t /= duration_s;
    }
    return time_at;
}

ComparisonReport estimate_vs_analytic(const ScenarioParams& params,
                                      const ModelOptions& options,
                                      std::span<const int> t_targets,
                                      std::span<const double> times,
                                      std::size_t n_runs,
                                      std::uint64_t seed,
                                      unsigned jobs)
{
    const auto estimates = simulate_runs(params, options, times, t_targets, n_runs, seed, jobs);

    const StateSpace space(params.max_vehicles());
    const RateMatrix a = build_rate_matrix(params, options, space);
    const TransientSolution sol = transient_distribution(a, initial_distribution(params, options, space), times);

    ComparisonReport report;
    report.n = params.max_vehicles();
    report.n_runs = n_runs;
    report.seed = seed;
    const double n = static_cast<double>(n_runs);
    for(const SimulationEstimate& est : estimates) {
        ComparisonCurve curve{est.t_target, {}};
        for(std::size_t g = 0; g < times.size(); ++g) {
            ComparisonPoint pt;
            pt.time_s = times[g];
            pt.p_hat = est.p_hat[g];
            pt.half_width_95 = est.half_width_95[g];
            pt.p_analytic = std::clamp(consistency_probability(sol.distributions[g], space, est.t_target), 0.0, 1.0);
            const double diff = pt.p_hat - pt.p_analytic;
            const double se = std::sqrt(pt.p_analytic * (1 - pt.p_analytic) / n);
            if(se > 0) {
                pt.z = diff / se;
            }
            else {
                pt.z = diff == 0 ? 0.0 : std::copysign(INFINITY, diff);
            }
            pt.exempt = n * std::min(pt.p_hat, 1 - pt.p_hat) < 5 &&
                        n * std::min(pt.p_analytic, 1 - pt.p_analytic) < 5;

            report.max_abs_diff = std::max(report.max_abs_diff, std::abs(diff));
            ++report.points;
            if(!pt.exempt && std::abs(pt.z) > 3) {
                ++report.beyond_3_sigma;
            }
            if(!pt.exempt && std::abs(pt.z) > 4) {
                ++report.flags;
            }
            curve.points.push_back(pt);
        }
        report.curves.push_back(std::move(curve));
    }
    return report;
}

} // namespace vcons
