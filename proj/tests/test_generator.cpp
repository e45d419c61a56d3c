#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "vcons/generator.hpp"

using namespace vcons;

namespace
{

double entry(const RateMatrix& m, const StateSpace& s, State from, State to)
{
    return m.matrix().coeff(static_cast<Eigen::Index>(s.index_of(from)), static_cast<Eigen::Index>(s.index_of(to)));
}

ScenarioParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> length(10, 2000), speed(1, 40), range(1, 300), refresh(0.5, 20), prob(0, 1);
    std::uniform_int_distribution<int> count(1, 25);
    return ScenarioParams::create("r", length(rng), speed(rng), count(rng), prob(rng), range(rng), refresh(rng));
}

} // namespace

TEST_CASE("N=1 chain by hand")
{
    const ScenarioParams p = testing::urban(1); // n_ave = 0.3, p1 = 0.7
    const StateSpace space(1);
    const RateMatrix a = build_rate_matrix(p, ModelOptions{}, space);
    const double mu = p.departure_rate();
    const double epidemic = 0.2 * 0.3 * (1 - 1e-5);

    CHECK(entry(a, space, {0, 0}, {0, 1}) == doctest::Approx(mu));
    CHECK(entry(a, space, {0, 1}, {0, 0}) == doctest::Approx(mu));
    CHECK(entry(a, space, {0, 1}, {1, 1}) == doctest::Approx(epidemic).epsilon(1e-14));
    CHECK(entry(a, space, {1, 1}, {0, 0}) == doctest::Approx(mu));
    CHECK(entry(a, space, {1, 1}, {1, 1}) == doctest::Approx(-mu));
    CHECK(entry(a, space, {0, 1}, {0, 1}) == doctest::Approx(-(mu + epidemic)));
    CHECK(a.matrix().nonZeros() == 7);

    ModelOptions off;
    off.source_always_transmits = false;
    CHECK(entry(build_rate_matrix(p, off, space), space, {0, 1}, {1, 1}) == 0.0);
}

TEST_CASE("epidemic rate values")
{
    const ScenarioParams u20 = testing::urban(20);
    CHECK(epidemic_rate(1, 20, 6, u20) == doctest::Approx(0.19998800029999608).epsilon(1e-13));
    CHECK(epidemic_rate(1, 20, 7, u20) == 0.0);

    const ScenarioParams u10 = testing::urban(10);
    CHECK(epidemic_rate(2, 4, 1, u10) == doctest::Approx(3.99996e-6).epsilon(1e-10));

    // D = 1, p_e = 0.5, n_ave = 3 * 10 / 20 = 1.5 so p1 = 0.5.
    const ScenarioParams synth = ScenarioParams::create("s", 20, 1, 10, 0.5, 3, 1);
    REQUIRE(synth.p1() == doctest::Approx(0.5));
    CHECK(epidemic_rate(1, 10, 1, synth) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(epidemic_rate(1, 10, 3, synth) == 0.0);
    CHECK(epidemic_rate(5, 5, 1, synth) == 0.0);
}

TEST_CASE("urban N=20 generator entry for a full refresh")
{
    const ScenarioParams p = testing::urban(20);
    const StateSpace space(20);
    const RateMatrix a = build_rate_matrix(p, ModelOptions{}, space);
    CHECK(entry(a, space, {1, 20}, {7, 20}) == doctest::Approx(0.1999880).epsilon(1e-7));
    CHECK(entry(a, space, {1, 20}, {1, 20}) < 0);
}

TEST_CASE("certain failure removes every epidemic edge")
{
    const ScenarioParams p = testing::with_p_fail(testing::urban(8), 1.0);
    const StateSpace space(8);
    const RateMatrix a = build_rate_matrix(p, ModelOptions{}, space);
    for(std::size_t r = 0; r < space.size(); ++r) {
        for(std::size_t c : a.successors(r)) {
            CHECK(space[c].holders <= space[r].holders);
        }
    }
}

TEST_CASE("reachability from (1,5)")
{
    const StateSpace space(5);
    const RateMatrix active = build_rate_matrix(testing::urban(5), ModelOptions{}, space);
    const auto d = validate_generator(active, space, {1, 5});
    CHECK(d.unreachable.empty());
    CHECK(d.negative_off_diagonals == 0);
    CHECK(d.row_sums_ok());
    CHECK(d.unique_recurrent_class());

    const RateMatrix dead = build_rate_matrix(testing::with_p_fail(testing::urban(5), 1.0), ModelOptions{}, space);
    const auto dd = validate_generator(dead, space, {1, 5});
    std::size_t high = 0;
    for(const State& s : space.states()) {
        high += s.holders >= 2 ? 1 : 0;
    }
    CHECK(dd.unreachable.size() == high);
    for(const State& s : dd.unreachable) {
        CHECK(s.holders >= 2);
    }
    // Holders only leave: the i = 0 states are the one closed class.
    CHECK(dd.recurrent_class_count == 1);
}

TEST_CASE("closed classes of a reducible matrix")
{
    // Two absorbing states and a transient one between them.
    SparseRows m(3, 3);
    m.insert(1, 0) = 1.0;
    m.insert(1, 2) = 2.0;
    m.insert(1, 1) = -3.0;
    const RateMatrix a(m);
    const auto classes = recurrent_classes(a);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == std::vector<std::size_t>{0});
    CHECK(classes[1] == std::vector<std::size_t>{2});
}

TEST_CASE("dump writes one triple per entry")
{
    const StateSpace space(1);
    const RateMatrix a = build_rate_matrix(testing::urban(1), ModelOptions{}, space);
    std::ostringstream out;
    a.dump(out);
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == a.matrix().nonZeros());
    CHECK(text.rfind("0 0 ", 0) == 0);
}

TEST_CASE("property: generator structure on random scenarios")
{
    std::mt19937_64 rng(77);
    for(int trial = 0; trial < 60; ++trial) {
        const ScenarioParams p = random_params(rng);
        ModelOptions options;
        options.source_always_transmits = trial % 2 == 0;
        const StateSpace space(p.max_vehicles());
        const RateMatrix a = build_rate_matrix(p, options, space);
        const auto d = validate_generator(a, space, {0, 0});
        CHECK(d.row_sums_ok());
        CHECK(d.negative_off_diagonals == 0);

        const double lambda = p.arrival_rate();
        const double mu = p.departure_rate();
        const double q = 1 - p.p_fail();
        for(std::size_t r = 0; r < space.size(); ++r) {
            const auto [i, j] = space[r];
            double up = 0, down = 0, epidemic = 0, weighted = 0;
            for(SparseRows::InnerIterator it(a.matrix(), static_cast<Eigen::Index>(r)); it; ++it) {
                if(it.col() == it.row()) {
                    continue;
                }
                const State to = space[static_cast<std::size_t>(it.col())];
                if(to.occupants == j + 1) {
                    CHECK(to.holders == i);
                    up += it.value();
                }
                else if(to.occupants == j - 1) {
                    CHECK((to.holders == i || to.holders == i - 1));
                    down += it.value();
                }
                else {
                    REQUIRE(to.occupants == j);
                    REQUIRE(to.holders > i);
                    epidemic += it.value();
                    weighted += (to.holders - i) * it.value();
                }
            }
            // Occupancy is an exact birth-death chain.
            CHECK(up == doctest::Approx(j < p.max_vehicles() ? lambda : 0.0).epsilon(1e-12));
            CHECK(down == doctest::Approx(j * mu).epsilon(1e-12));

            const int free = j - i;
            const int lo = std::min<double>(std::floor(p.n_ave()), free);
            const int hi = std::min<double>(std::ceil(p.n_ave()), free);
            const bool fires = i > 0 || options.source_always_transmits;
            const double null_mass = p.p1() * std::pow(1 - q, lo) + (1 - p.p1()) * std::pow(1 - q, hi);
            const double outflow = fires ? (1 - null_mass) / p.refresh_period() : 0.0;
            CHECK(std::abs(epidemic - outflow) <= 1e-12);
            const double mean = fires ? q * (p.p1() * lo + (1 - p.p1()) * hi) / p.refresh_period() : 0.0;
            CHECK(std::abs(weighted - mean) <= 1e-12 * std::max(1.0, mean));
        }
    }
}

TEST_CASE("generator does not depend on the initial condition")
{
    const ScenarioParams p = testing::urban(6);
    const StateSpace space(6);
    ModelOptions a, b;
    b.initial_i = 4;
    b.initial_j = FixedOccupancy{5};
    const SparseRows diff = build_rate_matrix(p, a, space).matrix() - build_rate_matrix(p, b, space).matrix();
    CHECK(diff.norm() == 0.0);
}

TEST_CASE("binomial pmf edge cases")
{
    CHECK(binomial_pmf(0, 0, 0.3) == 1.0);
    CHECK(binomial_pmf(2, 2, 1.0) == 1.0);
    CHECK(binomial_pmf(1, 2, 1.0) == 0.0);
    CHECK(binomial_pmf(0, 3, 0.0) == 1.0);
    CHECK(binomial_pmf(4, 3, 0.5) == 0.0);
    CHECK(binomial_pmf(2, 4, 0.5) == doctest::Approx(6.0 / 16).epsilon(1e-15));
}
