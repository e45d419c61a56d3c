#ifndef VCONS_MODEL_HPP
#define VCONS_MODEL_HPP

#include <stdexcept>
#include <string>
#include <variant>

namespace vcons
{

/// Raised for invalid scenario input. The message names the offending field.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class SpeedUnit { MetersPerSecond, KilometersPerHour };

double to_meters_per_second(double value, SpeedUnit unit);

/// Physical description of one road segment plus the rates derived from it.
///
/// Construct through `ScenarioParams::create` (or `scenario_from_config`);
/// the derived quantities are fixed at construction and the object is
/// immutable afterwards.
class ScenarioParams
{
public:
    static ScenarioParams create(std::string name,
                                 double segment_length_m,
                                 double speed_ms,
                                 int max_vehicles,
                                 double p_fail,
                                 double comm_range_m,
                                 double refresh_period_s);

    /// Same physical segment with a different vehicle population; every
    /// derived rate is recomputed.
    ScenarioParams with_max_vehicles(int n) const;

    const std::string& name() const { return m_name; }
    double segment_length() const { return m_length; }
    double speed() const { return m_speed; }
    int max_vehicles() const { return m_max_vehicles; }
    double p_fail() const { return m_p_fail; }
    double comm_range() const { return m_range; }
    double refresh_period() const { return m_refresh; }

    double sojourn_time() const { return m_sojourn; }
    double departure_rate() const { return m_departure; }
    double arrival_rate() const { return m_arrival; }
    double n_ave() const { return m_n_ave; }
    /// Probability of rounding the coverage count down: ceil(n_ave) - n_ave.
    double p1() const { return m_p1; }

private:
    ScenarioParams() = default;

    std::string m_name;
    double m_length = 0;
    double m_speed = 0;
    int m_max_vehicles = 0;
    double m_p_fail = 0;
    double m_range = 0;
    double m_refresh = 0;

    double m_sojourn = 0;
    double m_departure = 0;
    double m_arrival = 0;
    double m_n_ave = 0;
    double m_p1 = 0;
};

/// Initial occupancy j0 of the segment.
struct AtCapacity {};
struct FixedOccupancy { int j = 0; };
struct StationaryOccupancy {};
using InitialOccupancy = std::variant<AtCapacity, FixedOccupancy, StationaryOccupancy>;

struct ModelOptions
{
    bool source_always_transmits = true;
    int initial_i = 1;
    InitialOccupancy initial_j = AtCapacity{};
};

/// Throws ConfigError when the initial condition does not fit a segment of
/// `max_vehicles`. Returns a warning message (empty when none) for the
/// degenerate configuration in which the record can never appear.
std::string validate_options(const ModelOptions& options, int max_vehicles);

} // namespace vcons

#endif
