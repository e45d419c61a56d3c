#include "vcons/statespace.hpp"

#include <stdexcept>
#include <string>

namespace vcons
{

StateSpace::StateSpace(int max_vehicles) : m_max_vehicles(max_vehicles)
{
    if(max_vehicles < 1) {
        throw std::invalid_argument("state space needs at least one vehicle (N >= 1)");
    }
    m_states.reserve(state_count(max_vehicles));
    for(int j = 0; j <= max_vehicles; ++j) {
        for(int i = 0; i <= j; ++i) {
            m_states.push_back({i, j});
        }
    }
}

std::size_t StateSpace::index_of(State s) const
{
    if(!contains(s)) {
        throw std::out_of_range("state (" + std::to_string(s.holders) + "," + std::to_string(s.occupants) +
                                ") outside the state space");
    }
    const auto j = static_cast<std::size_t>(s.occupants);
    return j * (j + 1) / 2 + static_cast<std::size_t>(s.holders);
}

std::size_t state_count(int max_vehicles)
{
    const auto n = static_cast<std::size_t>(max_vehicles);
    return (n + 1) * (n + 2) / 2;
}

std::size_t state_count_paper(int max_vehicles)
{
    const auto n = static_cast<std::size_t>(max_vehicles);
    return (n * n + n) / 2;
}

std::size_t states_below_target_paper(int max_vehicles, int target)
{
    if(max_vehicles < 1 || target < 1 || target > max_vehicles) {
        throw std::invalid_argument("target must satisfy 1 <= t <= N");
    }
    const auto n = static_cast<std::size_t>(max_vehicles);
    const auto t = static_cast<std::size_t>(target);
    return t * n - t * (t - 1) / 2;
}

} // namespace vcons
