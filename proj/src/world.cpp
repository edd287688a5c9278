#include "dectrack/world.hpp"

#include <algorithm>
#include <limits>

namespace dectrack {

std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    // Rejection sampling for an unbiased bounded draw.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

AgentPose apply_action(const AgentPose& pose, Action a, const GridShape& shape) {
    int row = shape.row_of(pose.cell);
    int col = shape.col_of(pose.cell);
    switch (a) {
        case Action::Up: --row; break;
        case Action::Down: ++row; break;
        case Action::Left: --col; break;
        case Action::Right: ++col; break;
        case Action::Stay: break;
    }
    if (!shape.contains(row, col)) return pose;
    return {pose.agent_id, shape.index(row, col)};
}

TargetPolicy TargetPolicy::corner_patrol(const GridShape& shape) {
    return patrol({shape.index(0, 0), shape.index(0, shape.width - 1),
                   shape.index(shape.height - 1, shape.width - 1),
                   shape.index(shape.height - 1, 0)});
}

namespace {

int move_candidate(int cell, Action a, const GridShape& shape) {
    AgentPose p{0, cell};
    return apply_action(p, a, shape).cell;
}

int step_toward(int cell, int goal, const GridShape& shape) {
    if (cell == goal) return cell;
    const int row = shape.row_of(cell), col = shape.col_of(cell);
    const int grow = shape.row_of(goal), gcol = shape.col_of(goal);
    if (row != grow) {
        return shape.index(row + (grow > row ? 1 : -1), col);
    }
    return shape.index(row, col + (gcol > col ? 1 : -1));
}

} // namespace

TargetState step_target(const TargetState& state, const TargetPolicy& policy,
                        std::span<const AgentPose> agent_poses, const GridShape& shape, Rng& rng) {
    switch (policy.kind) {
        case TargetPolicy::Kind::Stationary:
            return state;

        case TargetPolicy::Kind::RandomWalk: {
            // Uniform over the moves that stay on the grid (Stay included).
            std::array<int, 5> cells{};
            int count = 0;
            for (Action a : kAllActions) {
                const int next = move_candidate(state.cell, a, shape);
                if (a == Action::Stay || next != state.cell) cells[count++] = next;
            }
            return {cells[static_cast<int>(rand_below(rng, count))], state.patrol_index};
        }

        case TargetPolicy::Kind::Evasive: {
            // Greedy evader: maximize the minimum Manhattan distance to any
            // agent; ties resolve in fixed action order.
            int best_cell = state.cell;
            int best_dist = -1;
            for (Action a : kAllActions) {
                const int next = move_candidate(state.cell, a, shape);
                int min_dist = std::numeric_limits<int>::max();
                for (const AgentPose& p : agent_poses) {
                    min_dist = std::min(min_dist, manhattan_distance(shape, next, p.cell));
                }
                if (min_dist > best_dist) {
                    best_dist = min_dist;
                    best_cell = next;
                }
            }
            return {best_cell, state.patrol_index};
        }

        case TargetPolicy::Kind::Patrol: {
            if (policy.waypoints.empty()) {
                throw ConfigInvalid("Patrol policy requires waypoints");
            }
            const int n = static_cast<int>(policy.waypoints.size());
            int cursor = state.patrol_index % n;
            if (state.cell == policy.waypoints[cursor]) {
                cursor = (cursor + 1) % n;
            }
            const int next = step_toward(state.cell, policy.waypoints[cursor], shape);
            if (next == policy.waypoints[cursor]) {
                cursor = (cursor + 1) % n;
            }
            return {next, cursor};
        }
    }
    throw ConfigInvalid("unknown target policy");
}

int sample_observation(const SensorModel& sensor, int target_cell, int agent_cell, Rng& rng) {
    const double p_detect = target_cell == agent_cell ? 1.0 - sensor.beta : sensor.alpha;
    return rand_unit(rng) < p_detect ? 1 : 0;
}

const char* action_name(Action a) {
    switch (a) {
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Left: return "left";
        case Action::Right: return "right";
        case Action::Stay: return "stay";
    }
    return "?";
}

} // namespace dectrack
