#pragma once

#include <stdexcept>
#include <string>

namespace dectrack {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two distributions (or a distribution and a cell index) disagree on grid shape.
class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

// The Bayes update annihilated all probability mass: the observation is
// impossible under the prior. The caller decides the recovery policy.
class ZeroEvidence : public Error {
public:
    explicit ZeroEvidence(const std::string& msg) : Error(msg) {}
};

// The weighted geometric product is zero everywhere (disjoint supports).
class DegenerateProduct : public Error {
public:
    explicit DegenerateProduct(const std::string& msg) : Error(msg) {}
};

// epsilon_floor * |S| >= 1: no distribution can satisfy the box constraint.
class InfeasibleFloor : public Error {
public:
    explicit InfeasibleFloor(const std::string& msg) : Error(msg) {}
};

// Brute-force simplex scan requested for a state space it cannot enumerate.
class TooLarge : public Error {
public:
    explicit TooLarge(const std::string& msg) : Error(msg) {}
};

// Win counting requires every strategy to appear in every configuration block.
class MisalignedBlocks : public Error {
public:
    explicit MisalignedBlocks(const std::string& msg) : Error(msg) {}
};

// A simulation or sweep configuration violates its invariants.
class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& msg) : Error(msg) {}
};

// File read/write failure in the report emitters.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace dectrack
