#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dectrack/merge.hpp"
#include "dectrack/planner.hpp"
#include "dectrack/world.hpp"

namespace dectrack {

struct SimConfig {
    GridShape shape{10, 10};
    int num_agents = 2;
    SensorModel sensor{0.1, 0.2};
    // nullopt: never merge; 0: merge every step; k>0: merge when t % k == 0.
    std::optional<long> comm_interval = 5;
    int max_steps = 2500;
    PlanConfig plan{3};
    MergeStrategy strategy{StrategyKind::VisitWeighted, {}};
    TargetPolicy target_policy = TargetPolicy::stationary();
    std::uint64_t seed = 0;
    // Optional fixed placements (tests and scripted scenarios); random
    // seeded placement otherwise, agents on distinct cells and the target
    // on an initially unoccupied cell.
    std::optional<std::vector<int>> initial_agent_cells;
    std::optional<int> initial_target_cell;

    void validate() const; // throws ConfigInvalid
    // Stable content hash of every semantically relevant field.
    std::string digest() const;
};

struct TrialRecord {
    bool success = false;
    std::optional<int> steps_to_discovery;
    std::uint64_t seed = 0;
    std::string config_digest;
    double duration_ms = 0.0;
    bool error_flag = false;
};

// One trial of the interleaved merge / plan-act / observe / target-move loop.
class Simulation {
public:
    explicit Simulation(SimConfig cfg);

    // Advances one time step; returns true once the target is discovered.
    bool step();

    // Runs to discovery or the step limit and returns the record.
    TrialRecord run();

    int t() const { return t_; }
    bool discovered() const { return discovered_; }
    int merge_count() const { return merge_count_; }
    const std::vector<Belief>& beliefs() const { return beliefs_; }
    const std::vector<AgentPose>& poses() const { return poses_; }
    const VisitCounts& visits() const { return visits_; }
    const TargetState& target() const { return target_; }
    const SimConfig& config() const { return cfg_; }

private:
    void merge_now();

    SimConfig cfg_;
    Rng rng_;
    int t_ = 0;
    bool discovered_ = false;
    int merge_count_ = 0;
    std::vector<AgentPose> poses_;
    std::vector<Belief> beliefs_;
    VisitCounts visits_;
    TargetState target_;
};

// Consensus computation + overwrite of every agent's belief. VisitWeighted
// uses the live visit counts; the remaining strategies use uniform scalar
// weights. A degenerate geometric product falls back to the uniform belief.
void merge_phase(std::vector<Belief>& beliefs, const VisitCounts& visits,
                 const MergeStrategy& strategy);

bool check_discovery(std::span<const AgentPose> poses, const TargetState& target);

TrialRecord run_trial(const SimConfig& cfg);

} // namespace dectrack
