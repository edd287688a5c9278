#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dectrack/planner.hpp"

using namespace dectrack;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unit(1e-6, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = unit(rng);
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

// Independent reference evaluator: materializes every branch posterior via
// bayes_update, with no shared code paths with the library's evaluator.
double reference_expected_entropy(const Belief& b, AgentPose pose, std::span<const Action> seq,
                                  const SensorModel& sensor, const GridShape& shape) {
    if (seq.empty()) return entropy(b);
    const AgentPose next = apply_action(pose, seq.front(), shape);
    double out = 0.0;
    for (int z = 0; z < 2; ++z) {
        double pz = 0.0;
        std::vector<double> unnorm(b.size());
        for (int s = 0; s < b.size(); ++s) {
            unnorm[s] = observation_likelihood(sensor, z, s, next.cell) * b[s];
            pz += unnorm[s];
        }
        if (pz <= 0.0) continue;
        for (double& x : unnorm) x /= pz;
        const Belief posterior(shape, std::move(unnorm));
        out += pz * reference_expected_entropy(posterior, next, seq.subspan(1), sensor, shape);
    }
    return out;
}

// Breadth-first enumeration over all 5^H sequences, written independently of
// the library's depth-first search. Returns the set of first actions whose
// best sequence lies within `tol` of the global minimum — near-ties are
// legitimate alternative answers since the two evaluators differ at the
// last-ulp level.
std::vector<Action> reference_best_actions(const Belief& b, AgentPose pose, int horizon,
                                           const SensorModel& sensor, const GridShape& shape,
                                           double tol = 1e-9) {
    std::vector<std::vector<Action>> frontier{{}};
    for (int d = 0; d < horizon; ++d) {
        std::vector<std::vector<Action>> next;
        for (const auto& seq : frontier) {
            for (Action a : kAllActions) {
                auto extended = seq;
                extended.push_back(a);
                next.push_back(std::move(extended));
            }
        }
        frontier = std::move(next);
    }
    std::vector<double> values;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seq : frontier) {
        values.push_back(reference_expected_entropy(b, pose, seq, sensor, shape));
        best = std::min(best, values.back());
    }
    std::vector<Action> out;
    for (size_t i = 0; i < frontier.size(); ++i) {
        if (values[i] <= best + tol) {
            const Action first = frontier[i].front();
            if (std::find(out.begin(), out.end(), first) == out.end()) out.push_back(first);
        }
    }
    return out;
}

bool contains(const std::vector<Action>& set, Action a) {
    return std::find(set.begin(), set.end(), a) != set.end();
}

double h2(double p) {
    auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
    return term(p) + term(1.0 - p);
}

} // namespace

TEST_CASE("certainty is absorbing under Stay") {
    const GridShape grid(3, 3);
    Belief delta(grid, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    const Action seq[] = {Action::Stay};
    CHECK(expected_entropy_after(delta, {0, 4}, seq, SensorModel(0.1, 0.2), grid) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-cell Stay branch enumeration") {
    const GridShape line(2, 1);
    const Belief uniform = Belief::uniform(line);
    const Action seq[] = {Action::Stay};
    const double expected = 0.45 * h2(8.0 / 9.0) + 0.55 * h2(2.0 / 11.0);
    CHECK(expected_entropy_after(uniform, {0, 0}, seq, SensorModel(0.1, 0.2), line) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uninformative sensor leaves entropy unchanged") {
    std::mt19937_64 rng(1);
    const GridShape grid(3, 2);
    for (int i = 0; i < 50; ++i) {
        const Belief b(grid, random_simplex(rng, 6));
        const Action seq[] = {Action::Right, Action::Down, Action::Stay};
        CHECK(expected_entropy_after(b, {0, 0}, seq, SensorModel(0.5, 0.5), grid) ==
              doctest::Approx(entropy(b)).epsilon(1e-9));
    }
}

TEST_CASE("delta mass elsewhere still ties: entropy is already zero") {
    // A one-hot belief has zero entropy; no observation changes it, so every
    // sequence ties and the fixed order picks Up. Verified by enumeration.
    const GridShape line(3, 1);
    const Belief b(line, {0, 0, 1});
    const Action chosen =
        plan_best_action(b, {0, 0}, PlanConfig{1}, SensorModel(0.1, 0.2), line);
    CHECK(contains(reference_best_actions(b, {0, 0}, 1, SensorModel(0.1, 0.2), line), chosen));
    CHECK(chosen == Action::Up);
}

TEST_CASE("planner moves toward distant mass") {
    // Same geometry with residual uncertainty: stepping toward the heavy
    // cell is strictly better than staying put.
    const GridShape line(3, 1);
    const Belief b(line, {0.02, 0.08, 0.9});
    const Action chosen =
        plan_best_action(b, {0, 0}, PlanConfig{1}, SensorModel(0.1, 0.2), line);
    const auto oracle = reference_best_actions(b, {0, 0}, 1, SensorModel(0.1, 0.2), line);
    REQUIRE(oracle.size() == 1);
    CHECK(chosen == oracle.front());
    CHECK(chosen == Action::Right);
}

TEST_CASE("all-tie case resolves to the first action deterministically") {
    const GridShape grid(3, 3);
    Belief delta(grid, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    const Action chosen =
        plan_best_action(delta, {0, 4}, PlanConfig{2}, SensorModel(0.1, 0.2), grid);
    CHECK(chosen == Action::Up);
}

TEST_CASE("symmetric two-cell grid resolves deterministically") {
    const GridShape line(2, 1);
    const Action a =
        plan_best_action(Belief::uniform(line), {0, 0}, PlanConfig{1}, SensorModel(0.1, 0.2), line);
    const Action b =
        plan_best_action(Belief::uniform(line), {0, 0}, PlanConfig{1}, SensorModel(0.1, 0.2), line);
    CHECK(a == b);
    CHECK(contains(reference_best_actions(Belief::uniform(line), {0, 0}, 1, SensorModel(0.1, 0.2),
                                          line),
                   a));
}

TEST_CASE("property: evaluator matches independent reference") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const GridShape grid(2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 3));
        const Belief b(grid, random_simplex(rng, grid.cell_count()));
        const SensorModel sensor(0.02 + 0.46 * unit(rng), 0.02 + 0.46 * unit(rng));
        const int len = 1 + static_cast<int>(rng() % 3);
        std::vector<Action> seq;
        for (int d = 0; d < len; ++d) seq.push_back(kAllActions[rng() % 5]);
        const AgentPose pose{0, static_cast<int>(rng() % grid.cell_count())};
        const double fast = expected_entropy_after(b, pose, seq, sensor, grid);
        const double slow = reference_expected_entropy(b, pose, seq, sensor, grid);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
}

TEST_CASE("property: planner matches breadth-first oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const int w = 2 + static_cast<int>(rng() % 2);
        const int h = 2 + static_cast<int>(rng() % 2);
        const GridShape grid(w, h);
        if (grid.cell_count() > 9) continue;
        const Belief b(grid, random_simplex(rng, grid.cell_count()));
        const SensorModel sensor(0.05 + 0.3 * unit(rng), 0.05 + 0.3 * unit(rng));
        const AgentPose pose{0, static_cast<int>(rng() % grid.cell_count())};
        const int horizon = 1 + static_cast<int>(rng() % 2);
        const Action chosen = plan_best_action(b, pose, PlanConfig{horizon}, sensor, grid);
        const auto oracle = reference_best_actions(b, pose, horizon, sensor, grid);
        CHECK(contains(oracle, chosen));
        // When the optimum is unique the tie-break must agree exactly.
        if (oracle.size() == 1) CHECK(chosen == oracle.front());
    }
}

TEST_CASE("property: chosen sequence beats all-Stay") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const GridShape grid(4, 4);
        const Belief b(grid, random_simplex(rng, 16));
        const SensorModel sensor(0.05 + 0.3 * unit(rng), 0.05 + 0.3 * unit(rng));
        const AgentPose pose{0, static_cast<int>(rng() % 16)};
        const PlanConfig cfg{2};
        const Action chosen = plan_best_action(b, pose, cfg, sensor, grid);

        // Exhaustively find the best sequence starting with the chosen action
        // and compare to the all-Stay sequence.
        double best_for_chosen = std::numeric_limits<double>::infinity();
        for (Action second : kAllActions) {
            const Action seq[] = {chosen, second};
            best_for_chosen =
                std::min(best_for_chosen, expected_entropy_after(b, pose, seq, sensor, grid));
        }
        const Action stay_seq[] = {Action::Stay, Action::Stay};
        CHECK(best_for_chosen <=
              expected_entropy_after(b, pose, stay_seq, sensor, grid) + 1e-12);
    }
}

TEST_CASE("space contract holds on a 50x50 grid at horizon 3") {
    const GridShape grid(50, 50);
    const Belief b = Belief::uniform(grid);
    const PlanConfig cfg{3};

    PlanStats fast_stats;
    plan_best_action(b, {0, grid.index(25, 25)}, cfg, SensorModel(0.2, 0.3), grid, &fast_stats);
    CHECK(fast_stats.peak_live_beliefs <= cfg.horizon + 1);
    CHECK(fast_stats.sequences_evaluated == 125);

    // alpha = 0 forces the evaluation path that materializes per-branch posteriors.
    PlanStats plain_stats;
    plan_best_action(b, {0, grid.index(25, 25)}, cfg, SensorModel(0.0, 0.3), grid, &plain_stats);
    CHECK(plain_stats.peak_live_beliefs <= cfg.horizon + 1);
    CHECK(plain_stats.peak_live_beliefs >= 1);
}

TEST_CASE("planning is deterministic across repeated calls") {
    std::mt19937_64 rng(5);
    const GridShape grid(6, 6);
    const Belief b(grid, random_simplex(rng, 36));
    const SensorModel sensor(0.1, 0.2);
    const Action first = plan_best_action(b, {0, 14}, PlanConfig{3}, sensor, grid);
    for (int i = 0; i < 5; ++i) {
        CHECK(plan_best_action(b, {0, 14}, PlanConfig{3}, sensor, grid) == first);
    }
}
