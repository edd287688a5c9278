#pragma once

#include <vector>

#include "dectrack/grid.hpp"

namespace dectrack {

// Normalization / equality tolerance for probability vectors.
inline constexpr double kProbTolerance = 1e-9;

// Binary detection sensor with false-positive rate alpha and
// false-negative rate beta.
struct SensorModel {
    double alpha = 0.1;
    double beta = 0.2;

    SensorModel() = default;
    SensorModel(double a, double b) : alpha(a), beta(b) {
        if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) {
            throw ConfigInvalid("SensorModel rates must lie in [0,1]");
        }
    }
};

// P(z | target at s, agent at agent_cell).
double observation_likelihood(const SensorModel& sensor, int z, int s, int agent_cell);

// Probability mass over grid cells. Immutable after construction; every
// constructing operation leaves the mass nonnegative and summing to 1
// within kProbTolerance.
class Belief {
public:
    // Accepts a vector that already sums to 1 within tolerance.
    Belief(GridShape shape, std::vector<double> mass);

    static Belief uniform(GridShape shape);

    // Rescales a nonnegative vector to sum exactly 1. Throws ZeroEvidence
    // if the total mass is zero.
    static Belief normalized(GridShape shape, std::vector<double> unnormalized);

    const GridShape& shape() const { return shape_; }
    const std::vector<double>& mass() const { return mass_; }
    double operator[](int cell) const { return mass_[cell]; }
    int size() const { return static_cast<int>(mass_.size()); }

    bool operator==(const Belief&) const = default;

private:
    Belief() = default;

    GridShape shape_;
    std::vector<double> mass_;
};

// Shannon entropy in nats, with 0*ln 0 == 0. Result lies in [0, ln|S|].
double entropy(const Belief& b);

// D_KL(p || q) in nats. Returns +infinity where p has mass outside q's
// support. Throws ShapeMismatch if the shapes differ.
double kl_divergence(const Belief& p, const Belief& q);

// Multiplicative Bayes step for a binary observation z taken at agent_cell.
// Throws ZeroEvidence if the observation has zero probability under the prior.
Belief bayes_update(const Belief& prior, const SensorModel& sensor, int z, int agent_cell);

} // namespace dectrack
