#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dectrack/belief.hpp"

namespace dectrack {

// Per-agent scalar weights summing to 1.
struct ScalarWeights {
    std::vector<double> w;

    explicit ScalarWeights(std::vector<double> weights);
    static ScalarWeights uniform(int num_agents);

    int size() const { return static_cast<int>(w.size()); }
    double operator[](int i) const { return w[i]; }
};

// Per-agent, per-cell physical visitation tallies.
class VisitCounts {
public:
    VisitCounts(int num_agents, int states);

    int num_agents() const { return num_agents_; }
    int states() const { return states_; }

    std::uint64_t at(int agent, int cell) const { return counts_[agent * states_ + cell]; }
    void increment(int agent, int cell) { ++counts_[agent * states_ + cell]; }
    void set(int agent, int cell, std::uint64_t v) { counts_[agent * states_ + cell] = v; }

    std::uint64_t total() const;

private:
    int num_agents_;
    int states_;
    std::vector<std::uint64_t> counts_;
};

// Laplace-smoothed spatial weights: for every cell the column over agents
// sums to 1 and every entry is strictly positive.
struct SpatialWeights {
    int num_agents = 0;
    int states = 0;
    std::vector<double> w; // num_agents x states, row-major by agent

    double at(int agent, int cell) const { return w[agent * states + cell]; }
};

struct SolverParams {
    double epsilon_floor = 1e-5;
    int max_iterations = 2000;
    double step_size = 0.1;
    std::optional<int> quantization_levels;
};

enum class StrategyKind {
    NumericForwardKL,
    NumericReverseKL,
    ArithmeticMean,
    GeometricMean,
    VisitWeighted,
};

struct MergeStrategy {
    StrategyKind kind = StrategyKind::VisitWeighted;
    SolverParams solver; // used by the numeric kinds only
};

// Sum_i w_i * D_KL(b_i || q).
double forward_kl_objective(std::span<const Belief> beliefs, const ScalarWeights& weights,
                            const Belief& q);

// Sum_i w_i * D_KL(q || b_i).
double reverse_kl_objective(std::span<const Belief> beliefs, const ScalarWeights& weights,
                            const Belief& q);

// Exact minimizer of the forward objective: the weighted arithmetic mean.
Belief arithmetic_merge(std::span<const Belief> beliefs, const ScalarWeights& weights);

// Exact minimizer of the reverse objective: the logarithmic opinion pool
// (normalized weighted geometric mean). Throws DegenerateProduct when the
// supports are disjoint and the normalizer vanishes.
Belief geometric_merge(std::span<const Belief> beliefs, const ScalarWeights& weights);

// w_i(s) = (v_i(s)+1) / sum_j (v_j(s)+1).
SpatialWeights visit_weights(const VisitCounts& visits);

// State-by-state weighted pooling with visit-derived spatial weights,
// renormalized to a distribution.
Belief visit_weighted_merge(std::span<const Belief> beliefs, const VisitCounts& visits);

struct NumericMergeResult {
    Belief belief;
    bool converged = false;
    int iterations = 0;
    // epsilon_floor * |S|: the mass the box constraint injects before any
    // projection redistributes it.
    double pre_projection_floor_mass = 0.0;
};

// Projected-gradient baseline minimizing the forward objective over the
// simplex intersected with [epsilon_floor, 1]. Reproduces the noise-floor
// and (optionally) piecewise-quantization artifacts of generic solvers.
NumericMergeResult numeric_forward_kl_merge(std::span<const Belief> beliefs,
                                            const ScalarWeights& weights,
                                            const SolverParams& params);

NumericMergeResult numeric_reverse_kl_merge(std::span<const Belief> beliefs,
                                            const ScalarWeights& weights,
                                            const SolverParams& params);

enum class MergeObjective { ForwardKL, ReverseKL };

// Exhaustive simplex grid scan (test oracle). Throws TooLarge for |S| > 4.
Belief brute_force_simplex_min(std::span<const Belief> beliefs, const ScalarWeights& weights,
                               MergeObjective objective, int resolution);

} // namespace dectrack
