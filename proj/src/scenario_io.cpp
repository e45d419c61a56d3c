#include "vcons/scenario_io.hpp"

#include <fstream>
#include <limits>
#include <string>

namespace vcons
{

using nlohmann::json;

namespace
{

const json& field(const json& obj, const char* key)
{
    auto it = obj.find(key);
    if(it == obj.end()) {
        throw ConfigError(std::string("missing field '") + key + "'");
    }
    return *it;
}

double number(const json& obj, const char* key)
{
    const json& v = field(obj, key);
    if(!v.is_number()) {
        throw ConfigError(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

int count(const json& obj, const char* key)
{
    const json& v = field(obj, key);
    if(!v.is_number_integer()) {
        throw ConfigError(std::string("field '") + key + "' must be an integer");
    }
    const auto raw = v.get<long long>();
    if(raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max()) {
        throw ConfigError(std::string("field '") + key + "' is out of range");
    }
    return static_cast<int>(raw);
}

SpeedUnit parse_unit(const json& speed)
{
    const json& unit = field(speed, "unit");
    if(unit == "kmh") {
        return SpeedUnit::KilometersPerHour;
    }
    if(unit == "ms") {
        return SpeedUnit::MetersPerSecond;
    }
    throw ConfigError("field 'unit' must be \"kmh\" or \"ms\"");
}

ModelOptions parse_options(const json& raw)
{
    ModelOptions options;
    auto it = raw.find("options");
    if(it == raw.end()) {
        return options;
    }
    const json& o = *it;
    if(!o.is_object()) {
        throw ConfigError("field 'options' must be an object");
    }
    if(auto s = o.find("source_always_transmits"); s != o.end()) {
        if(!s->is_boolean()) {
            throw ConfigError("field 'source_always_transmits' must be a boolean");
        }
        options.source_always_transmits = s->get<bool>();
    }
    if(o.contains("initial_i")) {
        options.initial_i = count(o, "initial_i");
    }
    if(auto j = o.find("initial_j"); j != o.end()) {
        if(j->is_number_integer()) {
            options.initial_j = FixedOccupancy{count(o, "initial_j")};
        }
        else if(*j == "capacity") {
            options.initial_j = AtCapacity{};
        }
        else if(*j == "stationary") {
            options.initial_j = StationaryOccupancy{};
        }
        else {
            throw ConfigError("field 'initial_j' must be an integer, \"capacity\" or \"stationary\"");
        }
    }
    return options;
}

} // namespace

Scenario scenario_from_config(const json& raw)
{
    if(!raw.is_object()) {
        throw ConfigError("scenario must be a JSON object");
    }
    std::string name = "scenario";
    if(auto it = raw.find("name"); it != raw.end()) {
        if(!it->is_string()) {
            throw ConfigError("field 'name' must be a string");
        }
        name = it->get<std::string>();
    }

    const json& speed = field(raw, "speed");
    if(!speed.is_object()) {
        throw ConfigError("field 'speed' must be an object with 'value' and 'unit'");
    }
    const double speed_ms = to_meters_per_second(number(speed, "value"), parse_unit(speed));

    ModelOptions options = parse_options(raw);
    ScenarioParams params = ScenarioParams::create(std::move(name),
                                                   number(raw, "length_m"),
                                                   speed_ms,
                                                   count(raw, "n_vehicles"),
                                                   number(raw, "p_fail"),
                                                   number(raw, "comm_range_m"),
                                                   number(raw, "refresh_s"));
    validate_options(options, params.max_vehicles());
    return {std::move(params), options};
}

json scenario_to_config(const Scenario& scenario)
{
    const ScenarioParams& p = scenario.params;
    const ModelOptions& o = scenario.options;

    json initial_j;
    if(std::holds_alternative<AtCapacity>(o.initial_j)) {
        initial_j = "capacity";
    }
    else if(std::holds_alternative<StationaryOccupancy>(o.initial_j)) {
        initial_j = "stationary";
    }
    else {
        initial_j = std::get<FixedOccupancy>(o.initial_j).j;
    }

    return json{
        {"name", p.name()},
        {"length_m", p.segment_length()},
        {"speed", {{"value", p.speed()}, {"unit", "ms"}}},
        {"n_vehicles", p.max_vehicles()},
        {"p_fail", p.p_fail()},
        {"comm_range_m", p.comm_range()},
        {"refresh_s", p.refresh_period()},
        {"options",
         {{"source_always_transmits", o.source_always_transmits},
          {"initial_i", o.initial_i},
          {"initial_j", initial_j}}},
    };
}

json read_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if(!in) {
        throw ConfigError("cannot open scenario file '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    }
    catch(const json::parse_error& e) {
        throw ConfigError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void apply_override(json& raw, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if(eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' must have the form key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));

    json value = json::parse(text, nullptr, false);
    if(value.is_discarded()) {
        value = text;
    }

    json* target = &raw;
    std::string::size_type start = 0;
    for(auto dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
        target = &(*target)[key.substr(start, dot - start)];
        start = dot + 1;
    }
    (*target)[key.substr(start)] = std::move(value);
}

} // namespace vcons
