#include "vcons/model.hpp"

#include <cmath>
#include <utility>

namespace vcons
{

double to_meters_per_second(double value, SpeedUnit unit)
{
    return unit == SpeedUnit::KilometersPerHour ? value / 3.6 : value;
}

namespace
{

void require(bool ok, const char* message)
{
    if(!ok) {
        throw ConfigError(message);
    }
}

} // namespace

ScenarioParams ScenarioParams::create(std::string name,
                                      double segment_length_m,
                                      double speed_ms,
                                      int max_vehicles,
                                      double p_fail,
                                      double comm_range_m,
                                      double refresh_period_s)
{
    // The negated comparisons also reject NaN.
    require(segment_length_m > 0 && std::isfinite(segment_length_m), "segment length must be positive");
    require(speed_ms > 0 && std::isfinite(speed_ms), "speed must be positive");
    require(max_vehicles >= 1, "n_vehicles must be at least 1");
    require(p_fail >= 0 && p_fail <= 1, "p_fail must lie in [0, 1]");
    require(comm_range_m > 0 && std::isfinite(comm_range_m), "communication range must be positive");
    require(refresh_period_s > 0 && std::isfinite(refresh_period_s), "refresh period must be positive");

    ScenarioParams p;
    p.m_name = std::move(name);
    p.m_length = segment_length_m;
    p.m_speed = speed_ms;
    p.m_max_vehicles = max_vehicles;
    p.m_p_fail = p_fail;
    p.m_range = comm_range_m;
    p.m_refresh = refresh_period_s;

    p.m_sojourn = segment_length_m / speed_ms;
    p.m_departure = 1.0 / p.m_sojourn;
    p.m_arrival = max_vehicles * p.m_departure;
    p.m_n_ave = comm_range_m * max_vehicles / segment_length_m;
    p.m_p1 = std::ceil(p.m_n_ave) - p.m_n_ave;
    return p;
}

ScenarioParams ScenarioParams::with_max_vehicles(int n) const
{
    return create(m_name, m_length, m_speed, n, m_p_fail, m_range, m_refresh);
}

std::string validate_options(const ModelOptions& options, int max_vehicles)
{
    if(options.initial_i < 0) {
        throw ConfigError("initial_i must be non-negative");
    }
    if(options.initial_i > max_vehicles) {
        throw ConfigError("initial_i exceeds n_vehicles");
    }
    if(const auto* fixed = std::get_if<FixedOccupancy>(&options.initial_j)) {
        if(fixed->j < options.initial_i || fixed->j > max_vehicles) {
            throw ConfigError("initial_j must satisfy initial_i <= initial_j <= n_vehicles");
        }
    }
    if(!options.source_always_transmits && options.initial_i == 0) {
        return "source does not transmit and initial_i = 0: the record can never appear, "
               "consistency is identically zero";
    }
    return {};
}

} // namespace vcons
