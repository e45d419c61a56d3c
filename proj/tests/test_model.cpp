#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "vcons/model.hpp"
#include "vcons/scenario_io.hpp"

using namespace vcons;
using nlohmann::json;

namespace
{

json urban_row()
{
    return json::parse(R"({
        "name": "urban", "length_m": 100, "speed": {"value": 30, "unit": "kmh"},
        "n_vehicles": 20, "p_fail": 1e-5, "comm_range_m": 30, "refresh_s": 5 })");
}

} // namespace

TEST_CASE("urban row derives the expected rates")
{
    const Scenario s = scenario_from_config(urban_row());
    const ScenarioParams& p = s.params;
    CHECK(p.speed() == doctest::Approx(30 / 3.6));
    CHECK(p.sojourn_time() == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(p.departure_rate() == doctest::Approx(0.0833333).epsilon(1e-6));
    CHECK(p.arrival_rate() == doctest::Approx(1.6666667).epsilon(1e-7));
    CHECK(p.n_ave() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(p.p1() == 0.0);

    CHECK(s.options.source_always_transmits);
    CHECK(s.options.initial_i == 1);
    CHECK(std::holds_alternative<AtCapacity>(s.options.initial_j));
}

TEST_CASE("highway row at N=30 has a fractional coverage count")
{
    const ScenarioParams p = testing::shipped("highway", 30).params;
    CHECK(p.departure_rate() == doctest::Approx(0.0277778).epsilon(1e-6));
    CHECK(p.n_ave() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(p.p1() == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("all shipped scenarios parse")
{
    for(const char* name : {"urban", "rural", "highway"}) {
        CAPTURE(name);
        const Scenario s = testing::shipped(name, 30);
        CHECK(s.params.name() == name);
        CHECK(s.params.comm_range() == 30);
        CHECK(s.params.refresh_period() == 5);
        CHECK(s.params.p_fail() == 1e-5);
    }
}

TEST_CASE("invalid fields are rejected with the field named")
{
    auto rejects = [](const char* key, json value, const char* fragment) {
        json raw = urban_row();
        raw[key] = std::move(value);
        CAPTURE(key);
        try {
            scenario_from_config(raw);
            FAIL("accepted");
        }
        catch(const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    rejects("speed", json{{"value", 0}, {"unit", "ms"}}, "speed must be positive");
    rejects("speed", json{{"value", 10}, {"unit", "mph"}}, "unit");
    rejects("length_m", -1, "segment length");
    rejects("refresh_s", 0, "refresh period");
    rejects("comm_range_m", 0, "communication range");
    rejects("p_fail", 1.5, "p_fail");
    rejects("p_fail", -0.1, "p_fail");
    rejects("n_vehicles", 0, "n_vehicles");
    rejects("n_vehicles", 2.5, "n_vehicles");

    json raw = urban_row();
    raw.erase("refresh_s");
    CHECK_THROWS_WITH_AS(scenario_from_config(raw), "missing field 'refresh_s'", ConfigError);
}

TEST_CASE("direct construction validates speed")
{
    CHECK_THROWS_WITH_AS(ScenarioParams::create("x", 100, 0, 10, 0, 30, 5), "speed must be positive", ConfigError);
}

TEST_CASE("initial condition options")
{
    ModelOptions o;
    o.initial_i = 3;
    o.initial_j = FixedOccupancy{2};
    CHECK_THROWS_AS(validate_options(o, 10), ConfigError);
    o.initial_j = FixedOccupancy{11};
    CHECK_THROWS_AS(validate_options(o, 10), ConfigError);
    o.initial_j = FixedOccupancy{5};
    CHECK(validate_options(o, 10).empty());
    o.initial_i = 11;
    o.initial_j = AtCapacity{};
    CHECK_THROWS_AS(validate_options(o, 10), ConfigError);

    ModelOptions silent;
    silent.source_always_transmits = false;
    silent.initial_i = 0;
    CHECK_FALSE(validate_options(silent, 10).empty());

    json raw = urban_row();
    raw["options"] = {{"initial_j", "stationary"}, {"source_always_transmits", false}};
    const Scenario s = scenario_from_config(raw);
    CHECK(std::holds_alternative<StationaryOccupancy>(s.options.initial_j));
    CHECK_FALSE(s.options.source_always_transmits);

    raw["options"] = {{"initial_j", "sometimes"}};
    CHECK_THROWS_AS(scenario_from_config(raw), ConfigError);
}

TEST_CASE("overrides address nested keys")
{
    json raw = urban_row();
    apply_override(raw, "n_vehicles=12");
    apply_override(raw, "speed.unit=ms");
    apply_override(raw, "options.initial_j=stationary");
    apply_override(raw, "name=downtown");
    CHECK(raw["n_vehicles"] == 12);
    CHECK(raw["speed"]["unit"] == "ms");
    CHECK(raw["options"]["initial_j"] == "stationary");
    CHECK(raw["name"] == "downtown");
    CHECK_THROWS_AS(apply_override(raw, "no_equals_sign"), ConfigError);
}

TEST_CASE("property: config round trip and mixture mean")
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> length(1.0, 5000.0), speed(0.5, 60.0), range(0.5, 800.0),
        refresh(0.1, 30.0), prob(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 60);

    for(int trial = 0; trial < 500; ++trial) {
        const ScenarioParams p =
            ScenarioParams::create("r", length(rng), speed(rng), count(rng), prob(rng), range(rng), refresh(rng));

        CHECK(std::abs(p.departure_rate() * p.sojourn_time() - 1.0) <= 2e-16);
        CHECK(p.arrival_rate() == p.max_vehicles() * p.departure_rate());
        CHECK(p.p1() >= 0.0);
        CHECK(p.p1() < 1.0);
        const double mean = std::floor(p.n_ave()) * p.p1() + std::ceil(p.n_ave()) * (1 - p.p1());
        CHECK(std::abs(mean - p.n_ave()) <= 1e-12 * std::max(1.0, p.n_ave()));

        Scenario s{p, ModelOptions{}};
        const Scenario back = scenario_from_config(json::parse(scenario_to_config(s).dump()));
        CHECK(back.params.departure_rate() == p.departure_rate());
        CHECK(back.params.arrival_rate() == p.arrival_rate());
        CHECK(back.params.sojourn_time() == p.sojourn_time());
        CHECK(back.params.n_ave() == p.n_ave());
        CHECK(back.params.p1() == p.p1());
    }
}

TEST_CASE("integer coverage count gives p1 = 0")
{
    CHECK(ScenarioParams::create("x", 100, 10, 10, 0, 30, 5).p1() == 0.0);
}
