// Acceptance battery: one pass/fail line per criterion; exit code is the
// number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "dectrack/stats.hpp"
#include "dectrack/sweep.hpp"

using namespace dectrack;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

std::vector<double> random_simplex(std::mt19937_64& rng, int n, double floor = 1e-4) {
    std::uniform_real_distribution<double> unit(floor, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = unit(rng);
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

struct OracleCheck {
    double max_linf = 0.0;
    double worst_objective_gap = -1e30; // analytic minus oracle; must stay <= 1e-9
};

OracleCheck oracle_battery(MergeObjective objective, int draws2, int draws3, int resolution) {
    std::mt19937_64 rng(objective == MergeObjective::ForwardKL ? 1001 : 2002);
    OracleCheck out;
    for (int draw = 0; draw < draws2 + draws3; ++draw) {
        const int n = draw < draws2 ? 2 : 3;
        const GridShape shape(n, 1);
        const std::vector<Belief> beliefs{Belief(shape, random_simplex(rng, n)),
                                          Belief(shape, random_simplex(rng, n))};
        const ScalarWeights w = ScalarWeights(random_simplex(rng, 2, 0.05));
        const Belief analytic = objective == MergeObjective::ForwardKL
                                    ? arithmetic_merge(beliefs, w)
                                    : geometric_merge(beliefs, w);
        const Belief oracle = brute_force_simplex_min(beliefs, w, objective, resolution);
        for (int s = 0; s < n; ++s) {
            out.max_linf = std::max(out.max_linf, std::abs(analytic[s] - oracle[s]));
        }
        const double analytic_obj = objective == MergeObjective::ForwardKL
                                        ? forward_kl_objective(beliefs, w, analytic)
                                        : reverse_kl_objective(beliefs, w, analytic);
        const double oracle_obj = objective == MergeObjective::ForwardKL
                                      ? forward_kl_objective(beliefs, w, oracle)
                                      : reverse_kl_objective(beliefs, w, oracle);
        out.worst_objective_gap = std::max(out.worst_objective_gap, analytic_obj - oracle_obj);
    }
    return out;
}

std::string canonical_csv(std::vector<SweepRecord> records) {
    for (SweepRecord& r : records) r.record.duration_ms = 0.0; // wall clock varies by run
    return records_to_csv(records);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---- criteria 1-2 ---------------------------------------------------------

void criterion_1_and_2() {
    const OracleCheck fwd = oracle_battery(MergeObjective::ForwardKL, 500, 200, 200);
    report(1, fwd.max_linf <= 2e-2 && fwd.worst_objective_gap <= 1e-9,
           fmt("arithmetic vs oracle: Linf %.3g (<= 2e-2), objective gap %.3g (<= 1e-9)",
               fwd.max_linf, fwd.worst_objective_gap));

    const OracleCheck rev = oracle_battery(MergeObjective::ReverseKL, 500, 200, 200);
    report(2, rev.max_linf <= 2e-2 && rev.worst_objective_gap <= 1e-9,
           fmt("geometric vs oracle: Linf %.3g (<= 2e-2), objective gap %.3g (<= 1e-9)",
               rev.max_linf, rev.worst_objective_gap));
}

// ---- criterion 3 ----------------------------------------------------------

void criterion_3() {
    bool ok = true;
    double previous = 0.0;
    for (std::uint64_t m : {std::uint64_t(100), std::uint64_t(10000), std::uint64_t(1000000)}) {
        VisitCounts trusted(3, 1);
        trusted.set(0, 0, m);
        const double w0 = visit_weights(trusted).at(0, 0);
        ok = ok && w0 > previous;
        previous = w0;
        if (m == 1000000 && w0 < 0.999) ok = false;

        VisitCounts untrusted(3, 1);
        untrusted.set(1, 0, m / 2);
        untrusted.set(2, 0, m - m / 2);
        const double w_rej = visit_weights(untrusted).at(0, 0);
        if (m == 1000000 && w_rej > 1e-5) ok = false;
    }
    report(3, ok, "trusted acceptance >= 0.999 at 1e6 visits, rejection <= 1e-5, monotone");
}

// ---- criterion 4 ----------------------------------------------------------

void criterion_4() {
    // Exact floor-mass identity at |S| = 10,000.
    const GridShape big(100, 100);
    const std::vector<Belief> uniforms{Belief::uniform(big), Belief::uniform(big)};
    SolverParams params;
    params.max_iterations = 200; // the identity is pre-projection; keep this quick
    const auto probe = numeric_forward_kl_merge(uniforms, ScalarWeights::uniform(2), params);
    const bool exact = probe.pre_projection_floor_mass == 0.10;

    // Directional error growth on Dirichlet(1) inputs.
    const std::vector<GridShape> sizes{GridShape(10, 10), GridShape(100, 100)};
    const auto rows = grid_error_experiment(sizes, 3, SolverParams{}, 99);
    double small_excess = 0.0, big_excess = 0.0;
    for (const auto& r : rows) {
        if (r.strategy != "numeric_forward_kl") continue;
        (r.states == 100 ? small_excess : big_excess) = r.mean_excess;
    }
    const bool growth = big_excess >= 10.0 * small_excess && small_excess >= 0.0;
    report(4, exact && growth,
           std::string("pre-projection floor mass ") + (exact ? "0.10 exact" : "NOT exact") +
               fmt("; excess %.4g at 1e4 cells vs %.4g at 1e2 cells (>= 10x)", big_excess,
                   small_excess));
}

// ---- criterion 5 ----------------------------------------------------------

void criterion_5() {
    const GridShape shape(4, 1);
    // A cell forced to exactly zero...
    const Belief prior(shape, {0.5, 0.5, 0.0, 0.0});
    const SensorModel sensor(0.2, 0.3);
    // ...followed by a definitive positive observation at that cell.
    Belief posterior = bayes_update(prior, sensor, 1, 2);
    bool ok = posterior[2] == 0.0;
    for (int repeat = 0; repeat < 25; ++repeat) {
        posterior = bayes_update(posterior, sensor, 1, 2);
        ok = ok && posterior[2] == 0.0;
    }
    report(5, ok, "zeroed cell stays exactly 0 through repeated positive observations");
}

// ---- criteria 6-7 ---------------------------------------------------------

double steps_or_max(const TrialRecord& r, int max_steps) {
    return r.success && r.steps_to_discovery ? static_cast<double>(*r.steps_to_discovery)
                                             : static_cast<double>(max_steps);
}

// Degraded-profile desk sweep with a true paired design: each configuration
// cell gets 50 seeds and every strategy runs on the same seed, so per-pair
// differences isolate the merge strategy from placement randomness.
void criterion_6_and_7() {
    constexpr int kSeeds = 50;
    constexpr int kMaxSteps = 2500;
    const std::vector<GridShape> grids{GridShape(15, 15), GridShape(20, 20)};
    const std::vector<TargetPolicy::Kind> patterns{TargetPolicy::Kind::Stationary,
                                                   TargetPolicy::Kind::Evasive};
    const std::vector<long> intervals{5, 10};

    struct Arm {
        double step_sum = 0.0;
        long successes = 0;
        long count = 0;
    };
    Arm am, vw;
    std::vector<double> diffs; // AM minus VW steps; positive favors VW
    std::map<std::tuple<int, std::string, long>, std::array<std::pair<long, long>, 2>> big_cells;

    for (const GridShape& grid : grids) {
        for (TargetPolicy::Kind pattern : patterns) {
            for (long k : intervals) {
                for (int i = 0; i < kSeeds; ++i) {
                    ConfigCoord coord{grid, 2, pattern, k, StrategyKind::ArithmeticMean, 0.20,
                                      0.30};
                    const std::uint64_t seed = derive_trial_seed(1234, coord, i);

                    SimConfig cfg;
                    cfg.shape = grid;
                    cfg.num_agents = 2;
                    cfg.sensor = SensorModel(0.20, 0.30);
                    cfg.comm_interval = k;
                    cfg.max_steps = kMaxSteps;
                    cfg.plan.horizon = 3;
                    cfg.target_policy = TargetPolicy{pattern, {}};
                    cfg.seed = seed;

                    cfg.strategy.kind = StrategyKind::ArithmeticMean;
                    const TrialRecord ra = run_trial(cfg);
                    cfg.strategy.kind = StrategyKind::VisitWeighted;
                    const TrialRecord rv = run_trial(cfg);

                    const double sa = steps_or_max(ra, kMaxSteps);
                    const double sv = steps_or_max(rv, kMaxSteps);
                    am.step_sum += sa;
                    vw.step_sum += sv;
                    am.successes += ra.success ? 1 : 0;
                    vw.successes += rv.success ? 1 : 0;
                    ++am.count;
                    ++vw.count;
                    diffs.push_back(sa - sv);

                    if (grid.cell_count() >= 400) {
                        cfg.strategy.kind = StrategyKind::NumericForwardKL;
                        const TrialRecord rf = run_trial(cfg);
                        auto& cell = big_cells[{grid.width, pattern_token(pattern), k}];
                        cell[0].first += ra.success ? 1 : 0;
                        ++cell[0].second;
                        cell[1].first += rf.success ? 1 : 0;
                        ++cell[1].second;
                    }
                }
            }
        }
    }

    const double am_mean = am.step_sum / am.count;
    const double vw_mean = vw.step_sum / vw.count;
    const double am_success = static_cast<double>(am.successes) / am.count;
    const double vw_success = static_cast<double>(vw.successes) / vw.count;
    const double p = paired_t_pvalue_greater(diffs);
    const bool ok6 = vw_mean < am_mean && p < 0.05 && vw_success >= am_success - 0.02;
    report(6, ok6,
           fmt("VW mean steps %.1f < AM %.1f, paired p %.4g < 0.05", vw_mean, am_mean, p) +
               fmt("; success VW %.3f vs AM %.3f (>= AM - 0.02)", vw_success, am_success));

    int am_wins = 0, total_cells = 0;
    for (const auto& [key, cell] : big_cells) {
        const double am_rate = static_cast<double>(cell[0].first) / cell[0].second;
        const double fkl_rate = static_cast<double>(cell[1].first) / cell[1].second;
        ++total_cells;
        if (am_rate >= fkl_rate) ++am_wins;
    }
    report(7, total_cells == 4 && am_wins * 4 >= total_cells * 3,
           fmt("arithmetic mean success >= numeric forward KL on %.0f of %.0f cells (>= 75%%)",
               am_wins, total_cells));
}

// ---- criterion 8 ----------------------------------------------------------

void criterion_8() {
    SimConfig cfg;
    cfg.shape = GridShape(10, 10);
    cfg.num_agents = 2;
    cfg.sensor = SensorModel(0.1, 0.2);
    cfg.comm_interval = 5;
    cfg.max_steps = 300;
    cfg.strategy.kind = StrategyKind::VisitWeighted;
    cfg.target_policy = TargetPolicy::random_walk();
    cfg.seed = 20260826;
    const TrialRecord a = run_trial(cfg);
    const TrialRecord b = run_trial(cfg);
    const bool trial_ok = a.success == b.success &&
                          a.steps_to_discovery == b.steps_to_discovery && a.seed == b.seed &&
                          a.config_digest == b.config_digest && a.error_flag == b.error_flag;

    SweepSpec spec;
    spec.grids = {GridShape(6, 6)};
    spec.patterns = {TargetPolicy::Kind::Stationary, TargetPolicy::Kind::RandomWalk};
    spec.comm_intervals = {std::optional<long>(3), std::nullopt};
    spec.strategies = {StrategyKind::ArithmeticMean, StrategyKind::VisitWeighted};
    spec.trials_per_config = 5;
    spec.max_steps = 60;
    spec.horizon = 2;
    const std::string serial = canonical_csv(run_sweep(spec));
    SweepSpec parallel = spec;
    parallel.parallelism = 8;
    const bool sweep_ok =
        canonical_csv(run_sweep(spec)) == serial && canonical_csv(run_sweep(parallel)) == serial;
    report(8, trial_ok && sweep_ok,
           "trial re-runs identical; canonical sweep CSV identical at parallelism 1 and 8");
}

// ---- criterion 9 ----------------------------------------------------------

void criterion_9() {
    const GridShape grid(50, 50);
    const PlanConfig cfg{3};
    PlanStats fast_stats;
    plan_best_action(Belief::uniform(grid), {0, grid.index(25, 25)}, cfg, SensorModel(0.2, 0.3),
                     grid, &fast_stats);
    PlanStats plain_stats; // alpha = 0 exercises materialized per-branch posteriors
    plan_best_action(Belief::uniform(grid), {0, grid.index(25, 25)}, cfg, SensorModel(0.0, 0.3),
                     grid, &plain_stats);
    const bool ok = fast_stats.peak_live_beliefs <= cfg.horizon + 1 &&
                    plain_stats.peak_live_beliefs <= cfg.horizon + 1;
    report(9, ok,
           fmt("peak live lookahead beliefs %.0f and %.0f (<= H+1 = 4) on 50x50 at H=3",
               fast_stats.peak_live_beliefs, plain_stats.peak_live_beliefs));
}

// ---- criterion 10 ---------------------------------------------------------

void criterion_10() {
    std::mt19937_64 rng(3003);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool ok = true;

    // Bayes normalization + zero-lock + KL nonnegativity, 1000 cases each.
    for (int i = 0; i < 1000 && ok; ++i) {
        const GridShape shape(2 + static_cast<int>(rng() % 5), 2 + static_cast<int>(rng() % 5));
        const int n = shape.cell_count();
        std::vector<double> mass = random_simplex(rng, n);
        const int hole = static_cast<int>(rng() % n);
        mass[(hole + 1) % n] += mass[hole];
        mass[hole] = 0.0;
        const Belief prior(shape, mass);
        const SensorModel sensor(0.05 + 0.4 * unit(rng), 0.05 + 0.4 * unit(rng));
        const Belief post =
            bayes_update(prior, sensor, static_cast<int>(rng() % 2), static_cast<int>(rng() % n));
        double total = 0.0;
        for (int s = 0; s < n; ++s) total += post[s];
        ok = ok && std::abs(total - 1.0) <= 1e-9 && post[hole] == 0.0;

        const Belief q(shape, random_simplex(rng, n));
        const Belief p(shape, random_simplex(rng, n));
        ok = ok && kl_divergence(p, q) >= -1e-12;
    }

    // Visit-weight column stochasticity + visit/arithmetic bridge, 1000 cases.
    for (int i = 0; i < 1000 && ok; ++i) {
        const int agents = 2 + static_cast<int>(rng() % 3);
        const int states = 2 + static_cast<int>(rng() % 6);
        VisitCounts counts(agents, states);
        for (int a = 0; a < agents; ++a)
            for (int s = 0; s < states; ++s) counts.set(a, s, rng() % 500);
        const SpatialWeights w = visit_weights(counts);
        for (int s = 0; s < states; ++s) {
            double col = 0.0;
            for (int a = 0; a < agents; ++a) col += w.at(a, s);
            ok = ok && std::abs(col - 1.0) <= 1e-9;
        }
    }

    // Kinematics: actions never leave the grid, 1000 cases.
    for (int i = 0; i < 1000 && ok; ++i) {
        const GridShape shape(1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8));
        const int cell = static_cast<int>(rng() % shape.cell_count());
        const Action a = kAllActions[rng() % 5];
        ok = ok && shape.contains(apply_action({0, cell}, a, shape).cell);
    }

    // Grid-error excess stays nonnegative (analytic optimality).
    const std::vector<GridShape> sizes{GridShape(3, 1), GridShape(4, 2)};
    for (const auto& row : grid_error_experiment(sizes, 25, SolverParams{}, 4004)) {
        ok = ok && row.mean_excess >= -1e-9;
    }

    report(10, ok, "consolidated invariant battery (full property suites run under ctest)");
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    criterion_1_and_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6_and_7();
    criterion_8();
    criterion_9();
    criterion_10();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 10 criteria passed in %.1f s\n", 10 - failures, secs);
    return failures;
}
