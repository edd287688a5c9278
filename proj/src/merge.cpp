#include "dectrack/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dectrack {
namespace {

void require_aligned(std::span<const Belief> beliefs, const ScalarWeights& weights) {
    if (beliefs.empty()) throw ConfigInvalid("merge requires at least one belief");
    if (weights.size() != static_cast<int>(beliefs.size())) {
        throw ShapeMismatch("weight count does not match belief count");
    }
    for (const Belief& b : beliefs) {
        if (b.shape() != beliefs.front().shape()) {
            throw ShapeMismatch("beliefs disagree on grid shape");
        }
    }
}

void require_same_shape(std::span<const Belief> beliefs) {
    if (beliefs.empty()) throw ConfigInvalid("merge requires at least one belief");
    for (const Belief& b : beliefs) {
        if (b.shape() != beliefs.front().shape()) {
            throw ShapeMismatch("beliefs disagree on grid shape");
        }
    }
}

double forward_objective_raw(std::span<const Belief> beliefs, const ScalarWeights& weights,
                             std::span<const double> q) {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
        if (weights[i] <= 0.0) continue;
        double d = 0.0;
        const auto& mass = beliefs[i].mass();
        for (size_t s = 0; s < q.size(); ++s) {
            const double ps = mass[s];
            if (ps <= 0.0) continue;
            if (q[s] <= 0.0) return std::numeric_limits<double>::infinity();
            d += ps * std::log(ps / q[s]);
        }
        total += weights[i] * d;
    }
    return total < 0.0 ? 0.0 : total;
}

double reverse_objective_raw(std::span<const Belief> beliefs, const ScalarWeights& weights,
                             std::span<const double> q) {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
        if (weights[i] <= 0.0) continue;
        double d = 0.0;
        const auto& mass = beliefs[i].mass();
        for (size_t s = 0; s < q.size(); ++s) {
            const double qs = q[s];
            if (qs <= 0.0) continue;
            if (mass[s] <= 0.0) return std::numeric_limits<double>::infinity();
            d += qs * std::log(qs / mass[s]);
        }
        total += weights[i] * d;
    }
    return total < 0.0 ? 0.0 : total;
}

// Euclidean projection onto the probability simplex (sort-based).
void project_simplex(std::vector<double>& q, std::vector<double>& scratch) {
    scratch.assign(q.begin(), q.end());
    std::sort(scratch.begin(), scratch.end(), std::greater<double>());
    double cumulative = 0.0;
    double tau = 0.0;
    int rho = 0;
    for (int i = 0; i < static_cast<int>(scratch.size()); ++i) {
        cumulative += scratch[i];
        const double candidate = (cumulative - 1.0) / (i + 1);
        if (scratch[i] - candidate > 0.0) {
            rho = i + 1;
            tau = candidate;
        }
    }
    (void)rho;
    for (double& v : q) v = std::max(v - tau, 0.0);
}

// Projection onto {simplex} intersected with the box [eps, 1]: simplex
// projection, then clamp to eps and rescale the unclamped coordinates until
// the clamped set stabilizes.
void project_floor_simplex(std::vector<double>& q, double eps, std::vector<double>& scratch) {
    project_simplex(q, scratch);
    const int n = static_cast<int>(q.size());
    std::vector<char> clamped(n, 0);
    for (int pass = 0; pass < n + 1; ++pass) {
        int num_clamped = 0;
        double free_mass = 0.0;
        bool newly_clamped = false;
        for (int i = 0; i < n; ++i) {
            if (!clamped[i] && q[i] < eps) {
                clamped[i] = 1;
                newly_clamped = true;
            }
            if (clamped[i]) {
                q[i] = eps;
                ++num_clamped;
            } else {
                free_mass += q[i];
            }
        }
        if (num_clamped == 0) return;
        const double target = 1.0 - eps * num_clamped;
        if (free_mass <= 0.0) {
            // All remaining mass sits on clamped coordinates; spread the
            // residual uniformly over the free ones.
            const int free = n - num_clamped;
            if (free == 0) return;
            for (int i = 0; i < n; ++i) {
                if (!clamped[i]) q[i] = target / free;
            }
            return;
        }
        const double scale = target / free_mass;
        for (int i = 0; i < n; ++i) {
            if (!clamped[i]) q[i] *= scale;
        }
        if (!newly_clamped && scale >= 1.0) return;
        bool any_below = false;
        for (int i = 0; i < n; ++i) {
            if (!clamped[i] && q[i] < eps) { any_below = true; break; }
        }
        if (!any_below) return;
    }
}

// Piecewise-linear interpolation of f over [eps, 1] on `levels` segments.
class PiecewiseLinear {
public:
    PiecewiseLinear(double (*f)(double), double eps, int levels) : eps_(eps), levels_(levels) {
        values_.resize(levels + 1);
        h_ = (1.0 - eps) / levels;
        for (int k = 0; k <= levels; ++k) values_[k] = f(eps + k * h_);
    }

    double value(double x) const {
        const int k = segment(x);
        const double x0 = eps_ + k * h_;
        return values_[k] + (values_[k + 1] - values_[k]) / h_ * (x - x0);
    }

    double slope(double x) const {
        const int k = segment(x);
        return (values_[k + 1] - values_[k]) / h_;
    }

private:
    int segment(double x) const {
        int k = static_cast<int>((x - eps_) / h_);
        return std::clamp(k, 0, levels_ - 1);
    }

    double eps_;
    double h_;
    int levels_;
    std::vector<double> values_;
};

double log_at(double x) { return std::log(x); }
double xlogx_at(double x) { return x * std::log(x); }

struct NumericObjective {
    // cell_coef holds m(s) for forward (coefficients of -log q) and c(s)
    // for reverse (coefficients of -q, paired with the x log x term).
    std::vector<double> cell_coef;
    bool reverse = false;
    std::optional<PiecewiseLinear> pl;

    double value(std::span<const double> q) const {
        double total = 0.0;
        if (!reverse) {
            for (size_t s = 0; s < q.size(); ++s) {
                total -= cell_coef[s] * (pl ? pl->value(q[s]) : std::log(q[s]));
            }
        } else {
            for (size_t s = 0; s < q.size(); ++s) {
                const double xlx = pl ? pl->value(q[s]) : q[s] * std::log(q[s]);
                total += xlx - q[s] * cell_coef[s];
            }
        }
        return total;
    }

    void gradient(std::span<const double> q, std::vector<double>& g) const {
        g.resize(q.size());
        if (!reverse) {
            for (size_t s = 0; s < q.size(); ++s) {
                g[s] = -cell_coef[s] * (pl ? pl->slope(q[s]) : 1.0 / q[s]);
            }
        } else {
            for (size_t s = 0; s < q.size(); ++s) {
                g[s] = (pl ? pl->slope(q[s]) : std::log(q[s]) + 1.0) - cell_coef[s];
            }
        }
    }
};

NumericMergeResult run_projected_gradient(const GridShape& shape, const NumericObjective& objective,
                                          const SolverParams& params) {
    const int n = shape.cell_count();
    const double eps = params.epsilon_floor;
    std::vector<double> q(n, 1.0 / n);
    std::vector<double> scratch, grad, candidate;
    project_floor_simplex(q, eps, scratch);

    double fq = objective.value(q);
    std::vector<double> best_q = q;
    double best_f = fq;
    double step = params.step_size;
    bool converged = false;
    int iterations = 0;

    for (int it = 0; it < params.max_iterations; ++it) {
        iterations = it + 1;
        objective.gradient(q, grad);
        candidate.resize(n);
        for (int s = 0; s < n; ++s) candidate[s] = q[s] - step * grad[s];
        project_floor_simplex(candidate, eps, scratch);
        const double fc = objective.value(candidate);
        if (fc < fq) {
            double delta = 0.0;
            for (int s = 0; s < n; ++s) delta = std::max(delta, std::abs(candidate[s] - q[s]));
            q.swap(candidate);
            fq = fc;
            if (fq < best_f) {
                best_f = fq;
                best_q = q;
            }
            step = std::min(step * 1.5, params.step_size);
            if (delta < 1e-10) {
                converged = true;
                break;
            }
        } else {
            step *= 0.5;
            if (step < 1e-16) {
                converged = true;
                break;
            }
        }
    }

    NumericMergeResult result{Belief::normalized(shape, std::move(best_q)), converged, iterations,
                              eps * n};
    return result;
}

NumericMergeResult numeric_merge(std::span<const Belief> beliefs, const ScalarWeights& weights,
                                 const SolverParams& params, bool reverse) {
    require_aligned(beliefs, weights);
    const GridShape shape = beliefs.front().shape();
    const int n = shape.cell_count();
    if (params.epsilon_floor <= 0.0 || params.epsilon_floor * n >= 1.0) {
        throw InfeasibleFloor("epsilon_floor * |S| must be < 1");
    }
    if (params.max_iterations < 1 || params.step_size <= 0.0) {
        throw ConfigInvalid("solver params require positive step and iterations");
    }

    NumericObjective objective;
    objective.reverse = reverse;
    objective.cell_coef.assign(n, 0.0);
    if (!reverse) {
        for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
            const auto& mass = beliefs[i].mass();
            for (int s = 0; s < n; ++s) objective.cell_coef[s] += weights[i] * mass[s];
        }
    } else {
        // Solvers floor the log arguments as well; a zero in some b_i(s)
        // becomes log(eps) rather than an infinite objective.
        for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
            const auto& mass = beliefs[i].mass();
            for (int s = 0; s < n; ++s) {
                objective.cell_coef[s] +=
                    weights[i] * std::log(std::max(mass[s], params.epsilon_floor));
            }
        }
    }
    if (params.quantization_levels) {
        if (*params.quantization_levels < 1) {
            throw ConfigInvalid("quantization_levels must be positive");
        }
        objective.pl.emplace(reverse ? xlogx_at : log_at, params.epsilon_floor,
                             *params.quantization_levels);
    }
    return run_projected_gradient(shape, objective, params);
}

} // namespace

ScalarWeights::ScalarWeights(std::vector<double> weights) : w(std::move(weights)) {
    if (w.empty()) throw ConfigInvalid("ScalarWeights requires at least one weight");
    double total = 0.0;
    for (double v : w) {
        if (v < 0.0 || v > 1.0) throw ConfigInvalid("scalar weights must lie in [0,1]");
        total += v;
    }
    if (std::abs(total - 1.0) > kProbTolerance) {
        throw ConfigInvalid("scalar weights must sum to 1");
    }
}

ScalarWeights ScalarWeights::uniform(int num_agents) {
    if (num_agents < 1) throw ConfigInvalid("need at least one agent");
    std::vector<double> w(num_agents, 1.0 / num_agents);
    // Force an exact unit sum regardless of 1/N rounding.
    w.back() = 1.0 - (num_agents - 1) * (1.0 / num_agents);
    return ScalarWeights(std::move(w));
}

VisitCounts::VisitCounts(int num_agents, int states)
    : num_agents_(num_agents), states_(states), counts_(static_cast<size_t>(num_agents) * states, 0) {
    if (num_agents < 1 || states < 1) {
        throw ConfigInvalid("VisitCounts requires positive dimensions");
    }
}

std::uint64_t VisitCounts::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

double forward_kl_objective(std::span<const Belief> beliefs, const ScalarWeights& weights,
                            const Belief& q) {
    require_aligned(beliefs, weights);
    if (q.shape() != beliefs.front().shape()) {
        throw ShapeMismatch("consensus shape does not match beliefs");
    }
    return forward_objective_raw(beliefs, weights, q.mass());
}

double reverse_kl_objective(std::span<const Belief> beliefs, const ScalarWeights& weights,
                            const Belief& q) {
    require_aligned(beliefs, weights);
    if (q.shape() != beliefs.front().shape()) {
        throw ShapeMismatch("consensus shape does not match beliefs");
    }
    return reverse_objective_raw(beliefs, weights, q.mass());
}

Belief arithmetic_merge(std::span<const Belief> beliefs, const ScalarWeights& weights) {
    require_aligned(beliefs, weights);
    const GridShape shape = beliefs.front().shape();
    std::vector<double> merged(shape.cell_count(), 0.0);
    for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
        const auto& mass = beliefs[i].mass();
        for (size_t s = 0; s < merged.size(); ++s) merged[s] += weights[i] * mass[s];
    }
    // Convex combination of distributions; the constructor asserts the unit
    // sum rather than renormalizing.
    return Belief(shape, std::move(merged));
}

Belief geometric_merge(std::span<const Belief> beliefs, const ScalarWeights& weights) {
    require_aligned(beliefs, weights);
    const GridShape shape = beliefs.front().shape();
    const int n = shape.cell_count();
    std::vector<double> log_prod(n, 0.0);
    std::vector<char> zero(n, 0);
    for (int i = 0; i < static_cast<int>(beliefs.size()); ++i) {
        if (weights[i] <= 0.0) continue;
        const auto& mass = beliefs[i].mass();
        for (int s = 0; s < n; ++s) {
            if (zero[s]) continue;
            if (mass[s] <= 0.0) {
                zero[s] = 1;
            } else {
                log_prod[s] += weights[i] * std::log(mass[s]);
            }
        }
    }
    double max_log = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        if (!zero[s]) max_log = std::max(max_log, log_prod[s]);
    }
    if (!std::isfinite(max_log)) {
        throw DegenerateProduct("weighted geometric product vanishes everywhere");
    }
    std::vector<double> merged(n, 0.0);
    for (int s = 0; s < n; ++s) {
        if (!zero[s]) merged[s] = std::exp(log_prod[s] - max_log);
    }
    return Belief::normalized(shape, std::move(merged));
}

SpatialWeights visit_weights(const VisitCounts& visits) {
    SpatialWeights sw;
    sw.num_agents = visits.num_agents();
    sw.states = visits.states();
    sw.w.assign(static_cast<size_t>(sw.num_agents) * sw.states, 0.0);
    for (int s = 0; s < sw.states; ++s) {
        double denom = 0.0;
        for (int i = 0; i < sw.num_agents; ++i) {
            denom += static_cast<double>(visits.at(i, s)) + 1.0;
        }
        for (int i = 0; i < sw.num_agents; ++i) {
            sw.w[static_cast<size_t>(i) * sw.states + s] =
                (static_cast<double>(visits.at(i, s)) + 1.0) / denom;
        }
    }
    return sw;
}

Belief visit_weighted_merge(std::span<const Belief> beliefs, const VisitCounts& visits) {
    require_same_shape(beliefs);
    const GridShape shape = beliefs.front().shape();
    const int n = shape.cell_count();
    if (visits.num_agents() != static_cast<int>(beliefs.size()) || visits.states() != n) {
        throw ShapeMismatch("visit counts do not match beliefs");
    }
    std::vector<double> merged(n, 0.0);
    std::vector<double> denom(n, 0.0);
    for (int i = 0; i < visits.num_agents(); ++i) {
        for (int s = 0; s < n; ++s) {
            denom[s] += static_cast<double>(visits.at(i, s)) + 1.0;
        }
    }
    for (int i = 0; i < visits.num_agents(); ++i) {
        const auto& mass = beliefs[i].mass();
        for (int s = 0; s < n; ++s) {
            merged[s] += (static_cast<double>(visits.at(i, s)) + 1.0) / denom[s] * mass[s];
        }
    }
    double total = std::accumulate(merged.begin(), merged.end(), 0.0);
    if (total <= 0.0) {
        // Unreachable for valid distributions: the smoothed weights are
        // strictly positive and the beliefs each carry unit mass.
        throw Error("visit-weighted merge produced zero total mass");
    }
    return Belief::normalized(shape, std::move(merged));
}

NumericMergeResult numeric_forward_kl_merge(std::span<const Belief> beliefs,
                                            const ScalarWeights& weights,
                                            const SolverParams& params) {
    return numeric_merge(beliefs, weights, params, /*reverse=*/false);
}

NumericMergeResult numeric_reverse_kl_merge(std::span<const Belief> beliefs,
                                            const ScalarWeights& weights,
                                            const SolverParams& params) {
    return numeric_merge(beliefs, weights, params, /*reverse=*/true);
}

Belief brute_force_simplex_min(std::span<const Belief> beliefs, const ScalarWeights& weights,
                               MergeObjective objective, int resolution) {
    require_aligned(beliefs, weights);
    const GridShape shape = beliefs.front().shape();
    const int n = shape.cell_count();
    if (n > 4) throw TooLarge("brute-force simplex scan supports |S| <= 4");
    if (resolution < 1) throw ConfigInvalid("resolution must be positive");

    std::vector<double> q(n, 0.0);
    std::vector<double> best;
    double best_value = std::numeric_limits<double>::infinity();

    // Depth-first enumeration of all compositions of `resolution` into n parts.
    std::vector<int> counts(n, 0);
    auto evaluate = [&]() {
        for (int s = 0; s < n; ++s) q[s] = static_cast<double>(counts[s]) / resolution;
        const double value = objective == MergeObjective::ForwardKL
                                 ? forward_objective_raw(beliefs, weights, q)
                                 : reverse_objective_raw(beliefs, weights, q);
        if (value < best_value) {
            best_value = value;
            best = q;
        }
    };
    // Iterative nested enumeration keeps the recursion trivial for n <= 4.
    auto recurse = [&](auto&& self, int coord, int remaining) -> void {
        if (coord == n - 1) {
            counts[coord] = remaining;
            evaluate();
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[coord] = c;
            self(self, coord + 1, remaining - c);
        }
    };
    recurse(recurse, 0, resolution);

    if (best.empty()) {
        throw Error("brute-force scan found no finite objective value");
    }
    return Belief::normalized(shape, std::move(best));
}

} // namespace dectrack
