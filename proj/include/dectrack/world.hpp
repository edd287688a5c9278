#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dectrack/belief.hpp"
#include "dectrack/grid.hpp"

namespace dectrack {

// Fixed tie-break order: Up < Down < Left < Right < Stay.
enum class Action { Up = 0, Down = 1, Left = 2, Right = 3, Stay = 4 };

inline constexpr std::array<Action, 5> kAllActions = {Action::Up, Action::Down, Action::Left,
                                                      Action::Right, Action::Stay};

struct AgentPose {
    int agent_id = 0;
    int cell = 0;
};

struct TargetPolicy {
    enum class Kind { Stationary, RandomWalk, Evasive, Patrol };

    Kind kind = Kind::Stationary;
    std::vector<int> waypoints; // Patrol only

    static TargetPolicy stationary() { return {Kind::Stationary, {}}; }
    static TargetPolicy random_walk() { return {Kind::RandomWalk, {}}; }
    static TargetPolicy evasive() { return {Kind::Evasive, {}}; }
    static TargetPolicy patrol(std::vector<int> waypoints) {
        return {Kind::Patrol, std::move(waypoints)};
    }
    // Patrol over the four grid corners, clockwise from the origin.
    static TargetPolicy corner_patrol(const GridShape& shape);
};

struct TargetState {
    int cell = 0;
    int patrol_index = 0;
};

using Rng = std::mt19937_64;

// Bounded draws built directly on the raw 64-bit stream so trial
// trajectories do not depend on the standard library's distribution
// implementations.
std::uint64_t rand_below(Rng& rng, std::uint64_t n);
double rand_unit(Rng& rng);

// One-cell move with boundary clamping: moves that would exit the grid
// leave the pose unchanged.
AgentPose apply_action(const AgentPose& pose, Action a, const GridShape& shape);

TargetState step_target(const TargetState& state, const TargetPolicy& policy,
                        std::span<const AgentPose> agent_poses, const GridShape& shape, Rng& rng);

// Draws z=1 with probability 1-beta when co-located, alpha otherwise.
int sample_observation(const SensorModel& sensor, int target_cell, int agent_cell, Rng& rng);

const char* action_name(Action a);

} // namespace dectrack
