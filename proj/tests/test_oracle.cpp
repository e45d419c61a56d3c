#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vcons/oracle.hpp"
#include "vcons/transient.hpp"

using namespace vcons;

TEST_CASE("no successful transmissions: never two holders")
{
    const ScenarioParams p = testing::with_p_fail(testing::urban(10), 1.0);
    const auto grid = time_grid(30.0, 1.0);
    const auto est = simulate_runs(p, ModelOptions{}, grid, 2, 5000, 3);
    for(double v : est.p_hat) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("record present at time zero")
{
    const auto grid = time_grid(10.0, 0.5);
    const auto est = simulate_runs(testing::urban(10), ModelOptions{}, grid, 1, 4000, 11);
    CHECK(est.p_hat.front() == 1.0);
    CHECK(est.half_width_95.front() == 0.0);
}

TEST_CASE("single holder survives as exp(-mu t)")
{
    for(int n : {1, 6}) {
        CAPTURE(n);
        const ScenarioParams p = testing::with_p_fail(testing::urban(n), 1.0);
        const auto grid = time_grid(30.0, 3.0);
        const std::size_t runs = 40000;
        const auto est = simulate_runs(p, ModelOptions{}, grid, 1, runs, 42);

        const StateSpace space(n);
        const auto sol = transient_distribution(build_rate_matrix(p, ModelOptions{}, space),
                                                point_mass(space, {1, n}), grid);
        for(std::size_t g = 0; g < grid.size(); ++g) {
            const double exact = std::exp(-p.departure_rate() * grid[g]);
            double analytic = 0;
            for(std::size_t k = 0; k < space.size(); ++k) {
                analytic += space[k].holders >= 1 ? sol.distributions[g].probabilities[static_cast<Eigen::Index>(k)] : 0;
            }
            CHECK(std::abs(analytic - exact) < 1e-9);
            const double se = std::sqrt(exact * (1 - exact) / runs);
            CHECK(std::abs(est.p_hat[g] - exact) <= 4 * se + 1e-12);
        }
    }
}

TEST_CASE("determinism and independence from the worker count")
{
    const auto grid = time_grid(20.0, 1.0);
    const int targets[] = {1, 3, 5};
    const ScenarioParams p = testing::urban(10);
    const auto a = simulate_runs(p, ModelOptions{}, grid, targets, 3000, 99, 1);
    const auto b = simulate_runs(p, ModelOptions{}, grid, targets, 3000, 99, 1);
    const auto c = simulate_runs(p, ModelOptions{}, grid, targets, 3000, 99, 3);
    const auto d = simulate_runs(p, ModelOptions{}, grid, targets, 3000, 100, 1);
    bool differs = false;
    for(std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].p_hat == b[k].p_hat);
        CHECK(a[k].p_hat == c[k].p_hat);
        differs = differs || a[k].p_hat != d[k].p_hat;
    }
    CHECK(differs);
}

TEST_CASE("estimate invariants: interval width and nested targets")
{
    const auto grid = time_grid(30.0, 1.5);
    const int targets[] = {1, 2, 4, 7};
    const std::size_t runs = 2500;
    const auto est = simulate_runs(testing::shipped("rural", 12).params, ModelOptions{}, grid, targets, runs, 8);
    for(std::size_t k = 0; k < est.size(); ++k) {
        CHECK(est[k].n_runs == runs);
        CHECK(est[k].seed == 8);
        for(std::size_t g = 0; g < grid.size(); ++g) {
            const double p = est[k].p_hat[g];
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(std::abs(est[k].half_width_95[g] - 1.96 * std::sqrt(p * (1 - p) / runs)) <= 1e-12);
            if(k > 0) {
                CHECK(est[k].p_hat[g] <= est[k - 1].p_hat[g]);
            }
        }
    }
}

TEST_CASE("long-run occupancy approaches the truncated Poisson law")
{
    const ScenarioParams p = testing::urban(8);
    const auto law = truncated_poisson(8);
    double previous = INFINITY;
    for(double duration : {2e3, 2e5}) {
        const auto freq = occupancy_time_average(p, ModelOptions{}, duration, 5);
        double chi2 = 0;
        for(std::size_t j = 0; j < law.size(); ++j) {
            chi2 += (freq[j] - law[j]) * (freq[j] - law[j]) / law[j];
        }
        CHECK(chi2 < previous);
        previous = chi2;
    }
    CHECK(previous < 1e-3);
}

TEST_CASE("comparison against the transient solver")
{
    const auto grid = time_grid(30.0, 1.0);
    const int targets[] = {1, 3, 5};
    const auto report = estimate_vs_analytic(testing::urban(10), ModelOptions{}, targets, grid, 20000, 2024);
    CHECK(report.points == 3 * grid.size());
    CHECK(report.flags == 0);
    CHECK(report.max_abs_diff < 0.02);
}

TEST_CASE("stationary initial occupancy is supported")
{
    ModelOptions o;
    o.initial_j = StationaryOccupancy{};
    const auto grid = time_grid(15.0, 1.0);
    const int targets[] = {1, 2};
    const auto report = estimate_vs_analytic(testing::shipped("highway", 12).params, o, targets, grid, 20000, 7);
    CHECK(report.flags == 0);
}

TEST_CASE("rejects targets beyond N and empty inputs")
{
    const auto grid = time_grid(1.0, 0.5);
    CHECK_THROWS_AS(simulate_runs(testing::urban(4), ModelOptions{}, grid, 5, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate_runs(testing::urban(4), ModelOptions{}, grid, 1, 0, 1), std::invalid_argument);
}
