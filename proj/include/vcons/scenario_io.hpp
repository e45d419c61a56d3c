#ifndef VCONS_SCENARIO_IO_HPP
#define VCONS_SCENARIO_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vcons/model.hpp"

namespace vcons
{

struct Scenario
{
    ScenarioParams params;
    ModelOptions options;
};

/// Parses the scenario schema:
///
///   { "name": "urban", "length_m": 100,
///     "speed": { "value": 30, "unit": "kmh" },
///     "n_vehicles": 30, "p_fail": 1e-5, "comm_range_m": 30, "refresh_s": 5,
///     "options": { "source_always_transmits": true,
///                  "initial_i": 1, "initial_j": "capacity" } }
///
/// `initial_j` is an integer, "capacity" (j0 = n_vehicles) or "stationary".
/// The `options` block and each of its keys are optional.
Scenario scenario_from_config(const nlohmann::json& raw);

/// Inverse of scenario_from_config. Speeds are written in m/s so that a
/// re-parse reproduces every derived rate bit-for-bit.
nlohmann::json scenario_to_config(const Scenario& scenario);

/// Reads and parses the file. Missing or unreadable files raise ConfigError
/// naming the path.
nlohmann::json read_scenario_file(const std::filesystem::path& path);

/// Applies `key=value` to a raw scenario. Dotted keys address nested
/// objects (`speed.value`, `options.initial_i`); the value is parsed as a
/// JSON literal and falls back to a plain string.
void apply_override(nlohmann::json& raw, std::string_view assignment);

} // namespace vcons

#endif
