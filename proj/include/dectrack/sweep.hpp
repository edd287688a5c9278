#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dectrack/sim.hpp"

namespace dectrack {

struct NoiseProfile {
    std::string name;
    double alpha = 0.1;
    double beta = 0.2;
};

// The named sensor profiles used throughout the experiments:
// high_quality, baseline, degraded, ghost_heavy, perfect.
NoiseProfile named_noise_profile(const std::string& name);

// Cartesian experiment grid. Every combination of the lists below is run
// trials_per_config times with per-trial seeds derived purely from the
// base seed and the configuration coordinates.
struct SweepSpec {
    std::vector<GridShape> grids = {{10, 10}};
    std::vector<int> agent_counts = {2};
    std::vector<TargetPolicy::Kind> patterns = {TargetPolicy::Kind::Stationary};
    std::vector<std::optional<long>> comm_intervals = {5}; // nullopt = never merge
    std::vector<StrategyKind> strategies = {StrategyKind::VisitWeighted};
    std::vector<NoiseProfile> noise_profiles = {named_noise_profile("baseline")};
    SolverParams solver;
    int trials_per_config = 10;
    std::uint64_t base_seed = 0;
    int parallelism = 1;
    int max_steps = 2500;
    int horizon = 3;

    void validate() const;
};

// Identity of one configuration cell (everything but the trial index).
struct ConfigCoord {
    GridShape grid{1, 1};
    int agents = 1;
    TargetPolicy::Kind pattern = TargetPolicy::Kind::Stationary;
    std::optional<long> comm_interval;
    StrategyKind strategy = StrategyKind::VisitWeighted;
    double alpha = 0.0;
    double beta = 0.0;

    bool operator==(const ConfigCoord&) const = default;
};

// Canonical output ordering.
bool coord_less(const ConfigCoord& a, const ConfigCoord& b);

struct SweepRecord {
    ConfigCoord coord;
    int trial_index = 0;
    TrialRecord record;
};

// Pure function of the base seed, the coordinate values, and the trial
// index; reordering the SweepSpec lists does not affect it.
std::uint64_t derive_trial_seed(std::uint64_t base_seed, const ConfigCoord& coord,
                                int trial_index);

SimConfig trial_config(const SweepSpec& spec, const ConfigCoord& coord, int trial_index);

// Executes every (configuration, trial) pair across a worker pool; the
// returned records are in canonical order regardless of scheduling. A trial
// that throws is recorded as a failure with error_flag set.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

struct AggregateStats {
    ConfigCoord coord;
    int trial_count = 0;
    double success_rate = 0.0;
    double success_stddev = 0.0;
    double mean_steps_failures_as_max = 0.0;
    std::optional<double> mean_steps_successes_only;
};

std::vector<AggregateStats> aggregate(std::span<const SweepRecord> records, int max_steps);

enum class Feature { Overall, Agents, Pattern, CommInterval, GridSize, Noise };

struct WinCell {
    std::string feature_value;
    StrategyKind strategy = StrategyKind::VisitWeighted;
    int success_wins = 0;
    int efficiency_wins = 0;
    int success_ties = 0;
    int efficiency_ties = 0;
};

// Per configuration block (all strategies on identical coordinates) the
// best success rate earns a success win and the lowest mean steps an
// efficiency win; ties award every tied strategy and are counted
// separately. Blocks missing a strategy raise MisalignedBlocks.
std::vector<WinCell> win_counts(std::span<const AggregateStats> stats, Feature feature,
                                bool exclude_comm_extremes);

struct GridErrorRow {
    int states = 0;
    std::string strategy;
    double mean_excess = 0.0;
};

// Mean objective excess of each merge route over the matching analytic
// optimum on Dirichlet(1) belief draws, per grid size.
std::vector<GridErrorRow> grid_error_experiment(std::span<const GridShape> sizes, int trials,
                                                const SolverParams& params, std::uint64_t seed,
                                                int num_agents = 2);

// --- tokens and serialization -------------------------------------------

const char* strategy_token(StrategyKind kind);
StrategyKind strategy_from_token(const std::string& token);
const char* pattern_token(TargetPolicy::Kind kind);
TargetPolicy::Kind pattern_from_token(const std::string& token);
std::string comm_token(const std::optional<long>& comm);
std::optional<long> comm_from_token(const std::string& token);

std::string records_to_csv(std::span<const SweepRecord> records);
std::vector<SweepRecord> records_from_csv(const std::string& text);
std::string stats_to_csv(std::span<const AggregateStats> stats);
std::string wins_to_csv(std::span<const WinCell> wins, const std::string& feature_name);
std::string grid_error_to_csv(std::span<const GridErrorRow> rows);

// Markdown report mirroring the experiment tables: overall per-strategy
// metrics plus win counts, and per-feature efficiency-win breakdowns with
// the comm-interval extremes excluded.
std::string report_markdown(std::span<const AggregateStats> stats, int max_steps);

// Parses the documented JSON sweep grammar.
SweepSpec sweep_spec_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace dectrack
