#ifndef VCONS_STATESPACE_HPP
#define VCONS_STATESPACE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace vcons
{

/// A CTMC state: `holders` vehicles store the record out of `occupants`
/// vehicles currently in the segment.
struct State
{
    int holders = 0;
    int occupants = 0;

    friend bool operator==(const State&, const State&) = default;
};

/// All pairs 0 <= holders <= occupants <= N in canonical order: ascending
/// occupants, then ascending holders. The order is what makes `index_of` a
/// closed form; nothing else should depend on it.
class StateSpace
{
public:
    explicit StateSpace(int max_vehicles);

    int max_vehicles() const { return m_max_vehicles; }
    std::size_t size() const { return m_states.size(); }
    std::span<const State> states() const { return m_states; }
    const State& operator[](std::size_t k) const { return m_states[k]; }

    bool contains(State s) const
    {
        return s.holders >= 0 && s.holders <= s.occupants && s.occupants <= m_max_vehicles;
    }

    /// Dense index of `s`; throws std::out_of_range for a state outside the space.
    std::size_t index_of(State s) const;

private:
    int m_max_vehicles;
    std::vector<State> m_states;
};

inline StateSpace enumerate_states(int max_vehicles) { return StateSpace(max_vehicles); }

/// (N+1)(N+2)/2, the size of the closed space.
std::size_t state_count(int max_vehicles);

/// The number of states quoted alongside the rate matrix, (N^2+N)/2. It
/// counts only 0 <= i < j <= N and is reported for cross-reference.
std::size_t state_count_paper(int max_vehicles);

/// Number of states with fewer than t holders under the reduced counting,
/// t*N - t(t-1)/2. Report use only; consistency is summed directly.
std::size_t states_below_target_paper(int max_vehicles, int target);

} // namespace vcons

#endif
