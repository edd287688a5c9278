#include "dectrack/belief.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace dectrack {

double observation_likelihood(const SensorModel& sensor, int z, int s, int agent_cell) {
    if (s == agent_cell) {
        return z == 1 ? 1.0 - sensor.beta : sensor.beta;
    }
    return z == 1 ? sensor.alpha : 1.0 - sensor.alpha;
}

Belief::Belief(GridShape shape, std::vector<double> mass) {
    if (static_cast<int>(mass.size()) != shape.cell_count()) {
        throw ShapeMismatch("belief mass length does not match grid shape");
    }
    double total = 0.0;
    for (double m : mass) {
        if (m < 0.0) throw ConfigInvalid("belief mass must be nonnegative");
        total += m;
    }
    if (std::abs(total - 1.0) > kProbTolerance) {
        throw ConfigInvalid("belief mass must sum to 1 within tolerance");
    }
    shape_ = shape;
    mass_ = std::move(mass);
}

Belief Belief::uniform(GridShape shape) {
    const int n = shape.cell_count();
    return Belief(shape, std::vector<double>(n, 1.0 / n));
}

Belief Belief::normalized(GridShape shape, std::vector<double> unnormalized) {
    if (static_cast<int>(unnormalized.size()) != shape.cell_count()) {
        throw ShapeMismatch("belief mass length does not match grid shape");
    }
    double total = 0.0;
    for (double m : unnormalized) {
        if (m < 0.0) throw ConfigInvalid("belief mass must be nonnegative");
        total += m;
    }
    if (total <= 0.0) {
        throw ZeroEvidence("cannot normalize a zero-mass vector");
    }
    for (double& m : unnormalized) m /= total;
    Belief b;
    b.shape_ = shape;
    b.mass_ = std::move(unnormalized);
    return b;
}

double entropy(const Belief& b) {
    double h = 0.0;
    for (double p : b.mass()) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h < 0.0 ? 0.0 : h;
}

double kl_divergence(const Belief& p, const Belief& q) {
    if (p.shape() != q.shape()) {
        throw ShapeMismatch("kl_divergence requires matching shapes");
    }
    double d = 0.0;
    for (int s = 0; s < p.size(); ++s) {
        const double ps = p[s];
        if (ps <= 0.0) continue;
        const double qs = q[s];
        if (qs <= 0.0) return std::numeric_limits<double>::infinity();
        d += ps * std::log(ps / qs);
    }
    return d < 0.0 ? 0.0 : d;
}

Belief bayes_update(const Belief& prior, const SensorModel& sensor, int z, int agent_cell) {
    if (!prior.shape().contains(agent_cell)) {
        throw ShapeMismatch("agent_cell outside grid");
    }
    std::vector<double> post(prior.mass());
    const double hit = observation_likelihood(sensor, z, agent_cell, agent_cell);
    const double miss = observation_likelihood(sensor, z, agent_cell + 1, agent_cell);
    for (double& m : post) m *= miss;
    post[agent_cell] = prior[agent_cell] * hit;

    double total = std::accumulate(post.begin(), post.end(), 0.0);
    if (total <= 0.0) {
        throw ZeroEvidence("observation has zero probability under the prior");
    }
    for (double& m : post) m /= total;
    return Belief::normalized(prior.shape(), std::move(post));
}

} // namespace dectrack
