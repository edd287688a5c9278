#include "dectrack/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dectrack {
namespace {

struct LiveGuard {
    explicit LiveGuard(PlanStats* stats) : stats_(stats) {
        if (stats_) {
            ++stats_->live_beliefs;
            stats_->peak_live_beliefs = std::max(stats_->peak_live_beliefs, stats_->live_beliefs);
        }
    }
    ~LiveGuard() {
        if (stats_) --stats_->live_beliefs;
    }
    PlanStats* stats_;
};

// General evaluator: materializes one posterior per lookahead level
// (depth-first, at most H+1 live beliefs including the root).
double eval_plain(const Belief& b, int pose_cell, std::span<const Action> seq, size_t idx,
                  const SensorModel& sensor, const GridShape& shape, PlanStats* stats) {
    if (idx == seq.size()) return entropy(b);
    const int cell = apply_action({0, pose_cell}, seq[idx], shape).cell;

    double acc = 0.0;
    for (int z : {1, 0}) {
        const double hit = observation_likelihood(sensor, z, cell, cell);
        const double miss = observation_likelihood(sensor, z, cell + 1, cell);
        std::vector<double> post(b.mass());
        double total = 0.0;
        for (size_t s = 0; s < post.size(); ++s) {
            post[s] *= static_cast<int>(s) == cell ? hit : miss;
            total += post[s];
        }
        if (total <= 0.0) continue; // impossible branch, predictive mass zero
        if (stats) ++stats->branches_evaluated;
        LiveGuard guard(stats);
        Belief posterior = Belief::normalized(b.shape(), std::move(post));
        acc += total * eval_plain(posterior, cell, seq, idx + 1, sensor, shape, stats);
    }
    return acc;
}

// Fast evaluator, valid for 0 < alpha < 1. Each observation multiplies the
// unnormalized belief by a constant plus a single-cell correction, so a
// branch is fully described by its visited-cell ratios and running mass:
// no belief copies are needed and leaf entropies cost O(H).
struct FastEval {
    const std::vector<double>& prior;
    double sum_plogp; // sum over cells of p ln p for the root belief
    SensorModel sensor;
    const GridShape& shape;
    std::span<const Action> seq;
    PlanStats* stats;

    static constexpr int kMaxCorrections = 16;
    int cells[kMaxCorrections];
    double ratios[kMaxCorrections];
    int correction_count = 0;

    double current_ratio(int cell) const {
        for (int i = 0; i < correction_count; ++i) {
            if (cells[i] == cell) return ratios[i];
        }
        return 1.0;
    }

    double leaf_entropy(double z_total) const {
        double sum_vlnv = sum_plogp;
        for (int i = 0; i < correction_count; ++i) {
            const double p = prior[cells[i]];
            if (p <= 0.0) continue;
            const double v = p * ratios[i];
            if (v > 0.0) sum_vlnv += v * std::log(v);
            sum_vlnv -= p * std::log(p);
        }
        const double h = std::log(z_total) - sum_vlnv / z_total;
        return h < 0.0 ? 0.0 : h;
    }

    double eval(size_t idx, int pose_cell, double z_total) {
        if (idx == seq.size()) return leaf_entropy(z_total);
        const int cell = apply_action({0, pose_cell}, seq[idx], shape).cell;
        const double v_cell = prior[cell] * current_ratio(cell);

        double acc = 0.0;
        for (int z : {1, 0}) {
            const double base = z == 1 ? sensor.alpha : 1.0 - sensor.alpha;
            const double spec = z == 1 ? 1.0 - sensor.beta : sensor.beta;
            const double pz = (base * (z_total - v_cell) + spec * v_cell) / z_total;
            if (pz <= 0.0) continue;
            if (stats) ++stats->branches_evaluated;
            const double next_total = z_total - v_cell + v_cell * (spec / base);

            if (prior[cell] <= 0.0) {
                // Zero-mass cell: the correction would stay zero forever.
                acc += pz * eval(idx + 1, cell, next_total);
                continue;
            }
            // Push (or scale) the correction for this cell, recurse, undo.
            int slot = -1;
            for (int i = 0; i < correction_count; ++i) {
                if (cells[i] == cell) { slot = i; break; }
            }
            const bool fresh = slot < 0;
            double saved = 1.0;
            if (fresh) {
                slot = correction_count++;
                cells[slot] = cell;
                ratios[slot] = spec / base;
            } else {
                saved = ratios[slot];
                ratios[slot] *= spec / base;
            }
            acc += pz * eval(idx + 1, cell, next_total);
            if (fresh) {
                --correction_count;
            } else {
                ratios[slot] = saved;
            }
        }
        return acc;
    }
};

bool fast_path_applicable(const SensorModel& sensor, size_t horizon) {
    return sensor.alpha > 0.0 && sensor.alpha < 1.0 && horizon <= FastEval::kMaxCorrections;
}

double sum_p_log_p(const Belief& b) {
    double total = 0.0;
    for (double p : b.mass()) {
        if (p > 0.0) total += p * std::log(p);
    }
    return total;
}

double expected_entropy_cached(const Belief& b, AgentPose pose, std::span<const Action> seq,
                               const SensorModel& sensor, const GridShape& shape, double plogp,
                               PlanStats* stats) {
    if (stats) ++stats->sequences_evaluated;
    if (fast_path_applicable(sensor, seq.size())) {
        FastEval eval{b.mass(), plogp, sensor, shape, seq, stats};
        return eval.eval(0, pose.cell, 1.0);
    }
    LiveGuard root(stats);
    return eval_plain(b, pose.cell, seq, 0, sensor, shape, stats);
}

} // namespace

double expected_entropy_after(const Belief& b, AgentPose pose, std::span<const Action> seq,
                              const SensorModel& sensor, const GridShape& shape,
                              PlanStats* stats) {
    if (b.shape() != shape) throw ShapeMismatch("belief shape does not match grid");
    if (!shape.contains(pose.cell)) throw ShapeMismatch("pose outside grid");
    return expected_entropy_cached(b, pose, seq, sensor, shape, sum_p_log_p(b), stats);
}

Action plan_best_action(const Belief& b, AgentPose pose, const PlanConfig& cfg,
                        const SensorModel& sensor, const GridShape& shape, PlanStats* stats) {
    if (cfg.horizon < 1) throw ConfigInvalid("planning horizon must be >= 1");
    if (b.shape() != shape) throw ShapeMismatch("belief shape does not match grid");

    const double plogp = sum_p_log_p(b);
    std::vector<Action> seq(cfg.horizon, Action::Up);
    double best_value = std::numeric_limits<double>::infinity();
    Action best_first = Action::Up;

    // Lexicographic depth-first enumeration; strict improvement keeps the
    // first minimal sequence, which realizes the stated tie-break.
    auto recurse = [&](auto&& self, int depth) -> void {
        if (depth == cfg.horizon) {
            const double value =
                expected_entropy_cached(b, pose, seq, sensor, shape, plogp, stats);
            if (value < best_value) {
                best_value = value;
                best_first = seq.front();
            }
            return;
        }
        for (Action a : kAllActions) {
            seq[depth] = a;
            self(self, depth + 1);
        }
    };
    recurse(recurse, 0);
    return best_first;
}

} // namespace dectrack
