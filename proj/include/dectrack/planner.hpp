#pragma once

#include <span>

#include "dectrack/belief.hpp"
#include "dectrack/world.hpp"

namespace dectrack {

struct PlanConfig {
    int horizon = 3;
};

// Instrumentation for the depth-first space contract: the planner never
// holds more than horizon+1 materialized lookahead beliefs at once.
struct PlanStats {
    int live_beliefs = 0;
    int peak_live_beliefs = 0;
    long long sequences_evaluated = 0;
    long long branches_evaluated = 0;
};

// Expected terminal entropy after executing `seq` from `pose`: the pose is
// simulated along the sequence and at each visited cell the belief branches
// on both observation outcomes, weighted by their predictive probability.
// The belief is not diffused between lookahead steps.
double expected_entropy_after(const Belief& b, AgentPose pose, std::span<const Action> seq,
                              const SensorModel& sensor, const GridShape& shape,
                              PlanStats* stats = nullptr);

// Depth-first enumeration of all 5^H action sequences; returns the first
// action of the sequence with minimal expected terminal entropy. Ties break
// to the lexicographically first sequence in fixed action order.
Action plan_best_action(const Belief& b, AgentPose pose, const PlanConfig& cfg,
                        const SensorModel& sensor, const GridShape& shape,
                        PlanStats* stats = nullptr);

} // namespace dectrack
