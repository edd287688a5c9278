#include "dectrack/sim.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace dectrack {
namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (value >> (byte * 8)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a_double(std::uint64_t h, double value) {
    return fnv1a(h, std::bit_cast<std::uint64_t>(value));
}

} // namespace

void SimConfig::validate() const {
    if (num_agents < 1) throw ConfigInvalid("num_agents must be >= 1");
    if (max_steps < 1) throw ConfigInvalid("max_steps must be >= 1");
    if (plan.horizon < 1) throw ConfigInvalid("plan horizon must be >= 1");
    if (comm_interval && *comm_interval < 0) {
        throw ConfigInvalid("comm_interval must be nonnegative");
    }
    if (num_agents > shape.cell_count()) {
        throw ConfigInvalid("more agents than grid cells");
    }
    if (target_policy.kind == TargetPolicy::Kind::Patrol) {
        if (target_policy.waypoints.empty()) {
            throw ConfigInvalid("Patrol policy requires waypoints");
        }
        for (int wp : target_policy.waypoints) {
            if (!shape.contains(wp)) throw ConfigInvalid("patrol waypoint outside grid");
        }
    }
    if (initial_agent_cells) {
        if (static_cast<int>(initial_agent_cells->size()) != num_agents) {
            throw ConfigInvalid("initial_agent_cells count must equal num_agents");
        }
        for (int c : *initial_agent_cells) {
            if (!shape.contains(c)) throw ConfigInvalid("initial agent cell outside grid");
        }
    }
    if (initial_target_cell && !shape.contains(*initial_target_cell)) {
        throw ConfigInvalid("initial target cell outside grid");
    }
    if (strategy.kind == StrategyKind::NumericForwardKL ||
        strategy.kind == StrategyKind::NumericReverseKL) {
        if (strategy.solver.epsilon_floor <= 0.0 ||
            strategy.solver.epsilon_floor * shape.cell_count() >= 1.0) {
            throw ConfigInvalid("solver epsilon_floor infeasible for this grid");
        }
    }
}

std::string SimConfig::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, static_cast<std::uint64_t>(shape.width));
    h = fnv1a(h, static_cast<std::uint64_t>(shape.height));
    h = fnv1a(h, static_cast<std::uint64_t>(num_agents));
    h = fnv1a_double(h, sensor.alpha);
    h = fnv1a_double(h, sensor.beta);
    h = fnv1a(h, comm_interval ? static_cast<std::uint64_t>(*comm_interval) + 1 : 0);
    h = fnv1a(h, static_cast<std::uint64_t>(max_steps));
    h = fnv1a(h, static_cast<std::uint64_t>(plan.horizon));
    h = fnv1a(h, static_cast<std::uint64_t>(strategy.kind));
    h = fnv1a_double(h, strategy.solver.epsilon_floor);
    h = fnv1a(h, static_cast<std::uint64_t>(strategy.solver.max_iterations));
    h = fnv1a_double(h, strategy.solver.step_size);
    h = fnv1a(h, strategy.solver.quantization_levels
                     ? static_cast<std::uint64_t>(*strategy.solver.quantization_levels) + 1
                     : 0);
    h = fnv1a(h, static_cast<std::uint64_t>(target_policy.kind));
    for (int wp : target_policy.waypoints) h = fnv1a(h, static_cast<std::uint64_t>(wp));
    h = fnv1a(h, seed);
    if (initial_agent_cells) {
        for (int c : *initial_agent_cells) h = fnv1a(h, static_cast<std::uint64_t>(c) + 1);
    }
    h = fnv1a(h, initial_target_cell ? static_cast<std::uint64_t>(*initial_target_cell) + 1 : 0);

    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

bool check_discovery(std::span<const AgentPose> poses, const TargetState& target) {
    for (const AgentPose& p : poses) {
        if (p.cell == target.cell) return true;
    }
    return false;
}

void merge_phase(std::vector<Belief>& beliefs, const VisitCounts& visits,
                 const MergeStrategy& strategy) {
    const std::span<const Belief> view(beliefs);
    Belief merged = Belief::uniform(beliefs.front().shape());
    switch (strategy.kind) {
        case StrategyKind::ArithmeticMean:
            merged = arithmetic_merge(view, ScalarWeights::uniform(view.size()));
            break;
        case StrategyKind::GeometricMean:
            try {
                merged = geometric_merge(view, ScalarWeights::uniform(view.size()));
            } catch (const DegenerateProduct&) {
                // Disjoint supports: uniform is the assumption-free consensus.
                merged = Belief::uniform(beliefs.front().shape());
            }
            break;
        case StrategyKind::VisitWeighted:
            merged = visit_weighted_merge(view, visits);
            break;
        case StrategyKind::NumericForwardKL:
            merged = numeric_forward_kl_merge(view, ScalarWeights::uniform(view.size()),
                                              strategy.solver)
                         .belief;
            break;
        case StrategyKind::NumericReverseKL:
            merged = numeric_reverse_kl_merge(view, ScalarWeights::uniform(view.size()),
                                              strategy.solver)
                         .belief;
            break;
    }
    for (Belief& b : beliefs) b = merged;
}

Simulation::Simulation(SimConfig cfg)
    : cfg_(std::move(cfg)),
      rng_(cfg_.seed),
      visits_(cfg_.num_agents, cfg_.shape.cell_count()) {
    cfg_.validate();

    if (cfg_.initial_agent_cells) {
        for (int i = 0; i < cfg_.num_agents; ++i) {
            poses_.push_back({i, (*cfg_.initial_agent_cells)[i]});
        }
    } else {
        // Distinct uniform cells via rejection on the trial stream.
        std::vector<char> taken(cfg_.shape.cell_count(), 0);
        for (int i = 0; i < cfg_.num_agents; ++i) {
            int cell;
            do {
                cell = static_cast<int>(rand_below(rng_, cfg_.shape.cell_count()));
            } while (taken[cell]);
            taken[cell] = 1;
            poses_.push_back({i, cell});
        }
    }

    if (cfg_.initial_target_cell) {
        target_ = {*cfg_.initial_target_cell, 0};
    } else {
        std::vector<char> occupied(cfg_.shape.cell_count(), 0);
        for (const AgentPose& p : poses_) occupied[p.cell] = 1;
        int cell;
        do {
            cell = static_cast<int>(rand_below(rng_, cfg_.shape.cell_count()));
        } while (occupied[cell] && cfg_.num_agents < cfg_.shape.cell_count());
        target_ = {cell, 0};
    }

    beliefs_.assign(cfg_.num_agents, Belief::uniform(cfg_.shape));
    // Starting cells count as physical occupancy.
    for (const AgentPose& p : poses_) visits_.increment(p.agent_id, p.cell);
    discovered_ = check_discovery(poses_, target_);
}

void Simulation::merge_now() {
    merge_phase(beliefs_, visits_, cfg_.strategy);
    ++merge_count_;
}

bool Simulation::step() {
    if (discovered_ || t_ >= cfg_.max_steps) return discovered_;
    ++t_;

    // (a) Communication and belief merging phase.
    if (cfg_.comm_interval) {
        const long k = *cfg_.comm_interval;
        if (k == 0 || (t_ % k == 0)) merge_now();
    }

    // (b) Planning and movement; agents act in id order and each increments
    // its own visit tally at the new cell.
    for (int i = 0; i < cfg_.num_agents; ++i) {
        const Action a =
            plan_best_action(beliefs_[i], poses_[i], cfg_.plan, cfg_.sensor, cfg_.shape);
        poses_[i] = apply_action(poses_[i], a, cfg_.shape);
        visits_.increment(i, poses_[i].cell);
    }

    // (c) Observation and Bayesian update.
    for (int i = 0; i < cfg_.num_agents; ++i) {
        const int z = sample_observation(cfg_.sensor, target_.cell, poses_[i].cell, rng_);
        try {
            beliefs_[i] = bayes_update(beliefs_[i], cfg_.sensor, z, poses_[i].cell);
        } catch (const ZeroEvidence&) {
            // Impossible observation under the prior: reset to uniform.
            beliefs_[i] = Belief::uniform(cfg_.shape);
        }
    }

    // (d) Target motion, then (e) the discovery check.
    target_ = step_target(target_, cfg_.target_policy, poses_, cfg_.shape, rng_);
    discovered_ = check_discovery(poses_, target_);
    return discovered_;
}

TrialRecord Simulation::run() {
    const auto start = std::chrono::steady_clock::now();
    while (!discovered_ && t_ < cfg_.max_steps) step();
    const auto end = std::chrono::steady_clock::now();

    TrialRecord record;
    record.success = discovered_;
    if (discovered_) record.steps_to_discovery = t_;
    record.seed = cfg_.seed;
    record.config_digest = cfg_.digest();
    record.duration_ms = std::chrono::duration<double, std::milli>(end - start).count();
    return record;
}

TrialRecord run_trial(const SimConfig& cfg) {
    Simulation sim(cfg);
    return sim.run();
}

} // namespace dectrack
