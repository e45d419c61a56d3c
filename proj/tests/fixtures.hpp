#ifndef VCONS_TESTS_FIXTURES_HPP
#define VCONS_TESTS_FIXTURES_HPP

#include <string>

#include "vcons/model.hpp"
#include "vcons/scenario_io.hpp"

namespace vcons::testing
{

inline std::string scenario_path(const std::string& name)
{
    return std::string(VCONS_SCENARIO_DIR) + "/" + name + ".json";
}

/// One of the shipped Table-1 style scenarios with N replaced.
inline Scenario shipped(const std::string& name, int n)
{
    Scenario s = scenario_from_config(read_scenario_file(scenario_path(name)));
    s.params = s.params.with_max_vehicles(n);
    return s;
}

inline ScenarioParams urban(int n)
{
    return ScenarioParams::create("urban", 100, 30 / 3.6, n, 1e-5, 30, 5);
}

inline ScenarioParams with_p_fail(const ScenarioParams& p, double p_fail)
{
    return ScenarioParams::create(p.name(), p.segment_length(), p.speed(), p.max_vehicles(), p_fail, p.comm_range(),
                                  p.refresh_period());
}

} // namespace vcons::testing

#endif
