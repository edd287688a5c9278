#include "dectrack/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dectrack/stats.hpp"

namespace dectrack {
namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t value) {
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (value >> (byte * 8)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

long comm_sort_key(const std::optional<long>& comm) {
    return comm ? *comm : std::numeric_limits<long>::max();
}

std::string grid_token(const GridShape& g) {
    return std::to_string(g.width) + "x" + std::to_string(g.height);
}

std::string noise_value_token(double alpha, double beta) {
    return "a" + fmt_g6(alpha) + "_b" + fmt_g6(beta);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

// Key identifying a win-count block: everything but the strategy.
struct BlockKey {
    GridShape grid{1, 1};
    int agents = 1;
    TargetPolicy::Kind pattern = TargetPolicy::Kind::Stationary;
    std::optional<long> comm_interval;
    double alpha = 0.0;
    double beta = 0.0;

    bool operator<(const BlockKey& o) const {
        auto key = [](const BlockKey& k) {
            return std::make_tuple(k.grid.width, k.grid.height, k.agents,
                                   static_cast<int>(k.pattern), comm_sort_key(k.comm_interval),
                                   k.alpha, k.beta);
        };
        return key(*this) < key(o);
    }
};

std::string feature_value_of(const BlockKey& key, Feature feature) {
    switch (feature) {
        case Feature::Overall: return "all";
        case Feature::Agents: return std::to_string(key.agents);
        case Feature::Pattern: return pattern_token(key.pattern);
        case Feature::CommInterval: return comm_token(key.comm_interval);
        case Feature::GridSize: return grid_token(key.grid);
        case Feature::Noise: return noise_value_token(key.alpha, key.beta);
    }
    return "?";
}

} // namespace

NoiseProfile named_noise_profile(const std::string& name) {
    if (name == "high_quality") return {name, 0.05, 0.10};
    if (name == "baseline") return {name, 0.10, 0.20};
    if (name == "degraded") return {name, 0.20, 0.30};
    if (name == "ghost_heavy") return {name, 0.30, 0.10};
    if (name == "perfect") return {name, 0.0, 0.0};
    throw ConfigInvalid("unknown noise profile: " + name);
}

void SweepSpec::validate() const {
    if (grids.empty() || agent_counts.empty() || patterns.empty() || comm_intervals.empty() ||
        strategies.empty() || noise_profiles.empty()) {
        throw ConfigInvalid("sweep spec lists must be nonempty");
    }
    if (trials_per_config < 1) throw ConfigInvalid("trials_per_config must be >= 1");
    if (parallelism < 1) throw ConfigInvalid("parallelism must be >= 1");
    if (max_steps < 1) throw ConfigInvalid("max_steps must be >= 1");
    if (horizon < 1) throw ConfigInvalid("horizon must be >= 1");
}

bool coord_less(const ConfigCoord& a, const ConfigCoord& b) {
    auto key = [](const ConfigCoord& c) {
        return std::make_tuple(c.grid.width, c.grid.height, c.agents,
                               std::string(pattern_token(c.pattern)),
                               comm_sort_key(c.comm_interval),
                               std::string(strategy_token(c.strategy)), c.alpha, c.beta);
    };
    return key(a) < key(b);
}

std::uint64_t derive_trial_seed(std::uint64_t base_seed, const ConfigCoord& coord,
                                int trial_index) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, base_seed);
    h = fnv1a(h, static_cast<std::uint64_t>(coord.grid.width));
    h = fnv1a(h, static_cast<std::uint64_t>(coord.grid.height));
    h = fnv1a(h, static_cast<std::uint64_t>(coord.agents));
    h = fnv1a_str(h, pattern_token(coord.pattern));
    h = fnv1a_str(h, comm_token(coord.comm_interval));
    h = fnv1a_str(h, strategy_token(coord.strategy));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(coord.alpha));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(coord.beta));
    h = fnv1a(h, static_cast<std::uint64_t>(trial_index));
    return splitmix64(h);
}

SimConfig trial_config(const SweepSpec& spec, const ConfigCoord& coord, int trial_index) {
    SimConfig cfg;
    cfg.shape = coord.grid;
    cfg.num_agents = coord.agents;
    cfg.sensor = SensorModel(coord.alpha, coord.beta);
    cfg.comm_interval = coord.comm_interval;
    cfg.max_steps = spec.max_steps;
    cfg.plan.horizon = spec.horizon;
    cfg.strategy = MergeStrategy{coord.strategy, spec.solver};
    cfg.target_policy = coord.pattern == TargetPolicy::Kind::Patrol
                            ? TargetPolicy::corner_patrol(coord.grid)
                            : TargetPolicy{coord.pattern, {}};
    cfg.seed = derive_trial_seed(spec.base_seed, coord, trial_index);
    return cfg;
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
    spec.validate();

    std::vector<ConfigCoord> coords;
    for (const GridShape& grid : spec.grids)
        for (int agents : spec.agent_counts)
            for (TargetPolicy::Kind pattern : spec.patterns)
                for (const auto& comm : spec.comm_intervals)
                    for (StrategyKind strategy : spec.strategies)
                        for (const NoiseProfile& noise : spec.noise_profiles) {
                            coords.push_back({grid, agents, pattern, comm, strategy, noise.alpha,
                                              noise.beta});
                        }
    std::sort(coords.begin(), coords.end(), coord_less);

    std::vector<SweepRecord> results(coords.size() * spec.trials_per_config);
    for (size_t c = 0; c < coords.size(); ++c) {
        for (int trial = 0; trial < spec.trials_per_config; ++trial) {
            auto& slot = results[c * spec.trials_per_config + trial];
            slot.coord = coords[c];
            slot.trial_index = trial;
        }
    }

    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= results.size()) return;
            SweepRecord& slot = results[i];
            const SimConfig cfg = trial_config(spec, slot.coord, slot.trial_index);
            try {
                slot.record = run_trial(cfg);
            } catch (...) {
                slot.record = TrialRecord{};
                slot.record.seed = cfg.seed;
                slot.record.config_digest = cfg.digest();
                slot.record.error_flag = true;
            }
        }
    };

    const int threads = std::min<int>(spec.parallelism, static_cast<int>(results.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return results;
}

std::vector<AggregateStats> aggregate(std::span<const SweepRecord> records, int max_steps) {
    std::vector<SweepRecord> sorted(records.begin(), records.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const SweepRecord& a, const SweepRecord& b) {
        if (coord_less(a.coord, b.coord)) return true;
        if (coord_less(b.coord, a.coord)) return false;
        return a.trial_index < b.trial_index;
    });

    std::vector<AggregateStats> out;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j < sorted.size() && sorted[j].coord == sorted[i].coord) ++j;

        AggregateStats stats;
        stats.coord = sorted[i].coord;
        stats.trial_count = static_cast<int>(j - i);
        std::vector<double> outcomes;
        double steps_as_max = 0.0;
        double steps_success = 0.0;
        int successes = 0;
        for (size_t k = i; k < j; ++k) {
            const TrialRecord& r = sorted[k].record;
            const bool ok = r.success && !r.error_flag;
            outcomes.push_back(ok ? 1.0 : 0.0);
            if (ok) {
                ++successes;
                steps_success += static_cast<double>(*r.steps_to_discovery);
                steps_as_max += static_cast<double>(*r.steps_to_discovery);
            } else {
                steps_as_max += static_cast<double>(max_steps);
            }
        }
        stats.success_rate = static_cast<double>(successes) / stats.trial_count;
        stats.success_stddev = sample_stddev(outcomes);
        stats.mean_steps_failures_as_max = steps_as_max / stats.trial_count;
        if (successes > 0) stats.mean_steps_successes_only = steps_success / successes;
        out.push_back(std::move(stats));
        i = j;
    }
    return out;
}

std::vector<WinCell> win_counts(std::span<const AggregateStats> stats, Feature feature,
                                bool exclude_comm_extremes) {
    std::map<BlockKey, std::vector<const AggregateStats*>> blocks;
    for (const AggregateStats& s : stats) {
        if (exclude_comm_extremes &&
            (!s.coord.comm_interval || *s.coord.comm_interval == 0)) {
            continue;
        }
        BlockKey key{s.coord.grid, s.coord.agents, s.coord.pattern, s.coord.comm_interval,
                     s.coord.alpha, s.coord.beta};
        blocks[key].push_back(&s);
    }

    // Every block must cover the same strategy set.
    std::vector<StrategyKind> reference;
    for (const auto& [key, cells] : blocks) {
        std::vector<StrategyKind> present;
        for (const AggregateStats* s : cells) present.push_back(s->coord.strategy);
        std::sort(present.begin(), present.end());
        if (std::adjacent_find(present.begin(), present.end()) != present.end()) {
            throw MisalignedBlocks("duplicate strategy within a configuration block");
        }
        if (reference.empty()) {
            reference = present;
        } else if (present != reference) {
            throw MisalignedBlocks("configuration blocks cover different strategy sets");
        }
    }

    std::map<std::pair<std::string, StrategyKind>, WinCell> cells;
    auto cell_of = [&](const std::string& value, StrategyKind strategy) -> WinCell& {
        auto [it, inserted] = cells.try_emplace({value, strategy});
        if (inserted) {
            it->second.feature_value = value;
            it->second.strategy = strategy;
        }
        return it->second;
    };

    for (const auto& [key, block] : blocks) {
        const std::string value = feature_value_of(key, feature);
        for (const AggregateStats* s : block) cell_of(value, s->coord.strategy);

        double best_success = -1.0;
        double best_steps = std::numeric_limits<double>::infinity();
        for (const AggregateStats* s : block) {
            best_success = std::max(best_success, s->success_rate);
            best_steps = std::min(best_steps, s->mean_steps_failures_as_max);
        }
        int success_winners = 0;
        int efficiency_winners = 0;
        for (const AggregateStats* s : block) {
            if (s->success_rate == best_success) ++success_winners;
            if (s->mean_steps_failures_as_max == best_steps) ++efficiency_winners;
        }
        for (const AggregateStats* s : block) {
            WinCell& cell = cell_of(value, s->coord.strategy);
            if (s->success_rate == best_success) {
                ++cell.success_wins;
                if (success_winners > 1) ++cell.success_ties;
            }
            if (s->mean_steps_failures_as_max == best_steps) {
                ++cell.efficiency_wins;
                if (efficiency_winners > 1) ++cell.efficiency_ties;
            }
        }
    }

    std::vector<WinCell> out;
    out.reserve(cells.size());
    for (auto& [key, cell] : cells) out.push_back(std::move(cell));
    std::sort(out.begin(), out.end(), [](const WinCell& a, const WinCell& b) {
        if (a.feature_value != b.feature_value) return a.feature_value < b.feature_value;
        return std::string(strategy_token(a.strategy)) < strategy_token(b.strategy);
    });
    return out;
}

std::vector<GridErrorRow> grid_error_experiment(std::span<const GridShape> sizes, int trials,
                                                const SolverParams& params, std::uint64_t seed,
                                                int num_agents) {
    if (sizes.empty()) throw ConfigInvalid("grid_error_experiment requires at least one size");
    if (trials < 1) throw ConfigInvalid("trials must be >= 1");
    if (num_agents < 1) throw ConfigInvalid("num_agents must be >= 1");

    std::vector<GridErrorRow> rows;
    for (const GridShape& shape : sizes) {
        const int n = shape.cell_count();
        Rng rng(splitmix64(seed ^ static_cast<std::uint64_t>(n)));
        const ScalarWeights weights = ScalarWeights::uniform(num_agents);

        double fwd_excess = 0.0;
        double rev_excess = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<Belief> beliefs;
            beliefs.reserve(num_agents);
            for (int i = 0; i < num_agents; ++i) {
                // Symmetric Dirichlet(1): normalized i.i.d. exponentials.
                std::vector<double> mass(n);
                for (double& m : mass) {
                    double u;
                    do {
                        u = rand_unit(rng);
                    } while (u <= 0.0);
                    m = -std::log(u);
                }
                beliefs.push_back(Belief::normalized(shape, std::move(mass)));
            }
            const std::span<const Belief> view(beliefs);

            const Belief arith = arithmetic_merge(view, weights);
            const Belief geom = geometric_merge(view, weights);
            const double fwd_opt = forward_kl_objective(view, weights, arith);
            const double rev_opt = reverse_kl_objective(view, weights, geom);

            const Belief fwd_num = numeric_forward_kl_merge(view, weights, params).belief;
            const Belief rev_num = numeric_reverse_kl_merge(view, weights, params).belief;
            fwd_excess += forward_kl_objective(view, weights, fwd_num) - fwd_opt;
            rev_excess += reverse_kl_objective(view, weights, rev_num) - rev_opt;
        }

        rows.push_back({n, strategy_token(StrategyKind::ArithmeticMean), 0.0});
        rows.push_back({n, strategy_token(StrategyKind::GeometricMean), 0.0});
        rows.push_back({n, strategy_token(StrategyKind::NumericForwardKL), fwd_excess / trials});
        rows.push_back({n, strategy_token(StrategyKind::NumericReverseKL), rev_excess / trials});
    }
    return rows;
}

const char* strategy_token(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::NumericForwardKL: return "numeric_forward_kl";
        case StrategyKind::NumericReverseKL: return "numeric_reverse_kl";
        case StrategyKind::ArithmeticMean: return "arithmetic_mean";
        case StrategyKind::GeometricMean: return "geometric_mean";
        case StrategyKind::VisitWeighted: return "visit_weighted";
    }
    return "?";
}

StrategyKind strategy_from_token(const std::string& token) {
    for (StrategyKind kind :
         {StrategyKind::NumericForwardKL, StrategyKind::NumericReverseKL,
          StrategyKind::ArithmeticMean, StrategyKind::GeometricMean, StrategyKind::VisitWeighted}) {
        if (token == strategy_token(kind)) return kind;
    }
    throw ConfigInvalid("unknown strategy token: " + token);
}

const char* pattern_token(TargetPolicy::Kind kind) {
    switch (kind) {
        case TargetPolicy::Kind::Stationary: return "stationary";
        case TargetPolicy::Kind::RandomWalk: return "random_walk";
        case TargetPolicy::Kind::Evasive: return "evasive";
        case TargetPolicy::Kind::Patrol: return "patrol";
    }
    return "?";
}

TargetPolicy::Kind pattern_from_token(const std::string& token) {
    for (TargetPolicy::Kind kind : {TargetPolicy::Kind::Stationary, TargetPolicy::Kind::RandomWalk,
                                    TargetPolicy::Kind::Evasive, TargetPolicy::Kind::Patrol}) {
        if (token == pattern_token(kind)) return kind;
    }
    throw ConfigInvalid("unknown pattern token: " + token);
}

std::string comm_token(const std::optional<long>& comm) {
    return comm ? std::to_string(*comm) : "inf";
}

std::optional<long> comm_from_token(const std::string& token) {
    if (token == "inf") return std::nullopt;
    return std::stol(token);
}

std::string records_to_csv(std::span<const SweepRecord> records) {
    std::string out =
        "grid_w,grid_h,agents,pattern,comm_interval,strategy,alpha,beta,seed,success,steps,"
        "error_flag,duration_ms\n";
    for (const SweepRecord& r : records) {
        out += std::to_string(r.coord.grid.width) + ',';
        out += std::to_string(r.coord.grid.height) + ',';
        out += std::to_string(r.coord.agents) + ',';
        out += pattern_token(r.coord.pattern);
        out += ',';
        out += comm_token(r.coord.comm_interval) + ',';
        out += strategy_token(r.coord.strategy);
        out += ',';
        out += fmt_g6(r.coord.alpha) + ',';
        out += fmt_g6(r.coord.beta) + ',';
        out += std::to_string(r.record.seed) + ',';
        out += r.record.success ? "1," : "0,";
        out += r.record.steps_to_discovery ? std::to_string(*r.record.steps_to_discovery) : "";
        out += ',';
        out += r.record.error_flag ? "1," : "0,";
        out += fmt_g6(r.record.duration_ms);
        out += '\n';
    }
    return out;
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty records CSV");

    std::vector<SweepRecord> records;
    int trial_counter = 0;
    ConfigCoord previous;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 13) throw IoError("malformed records CSV row: " + line);
        SweepRecord r;
        r.coord.grid = GridShape(std::stoi(fields[0]), std::stoi(fields[1]));
        r.coord.agents = std::stoi(fields[2]);
        r.coord.pattern = pattern_from_token(fields[3]);
        r.coord.comm_interval = comm_from_token(fields[4]);
        r.coord.strategy = strategy_from_token(fields[5]);
        r.coord.alpha = std::stod(fields[6]);
        r.coord.beta = std::stod(fields[7]);
        r.record.seed = std::stoull(fields[8]);
        r.record.success = fields[9] == "1";
        if (!fields[10].empty()) r.record.steps_to_discovery = std::stoi(fields[10]);
        r.record.error_flag = fields[11] == "1";
        r.record.duration_ms = std::stod(fields[12]);
        if (!records.empty() && previous == r.coord) {
            ++trial_counter;
        } else {
            trial_counter = 0;
        }
        previous = r.coord;
        r.trial_index = trial_counter;
        records.push_back(std::move(r));
    }
    return records;
}

std::string stats_to_csv(std::span<const AggregateStats> stats) {
    std::string out =
        "grid_w,grid_h,agents,pattern,comm_interval,strategy,alpha,beta,trials,success_rate,"
        "success_stddev,mean_steps_failures_as_max,mean_steps_successes_only\n";
    for (const AggregateStats& s : stats) {
        out += std::to_string(s.coord.grid.width) + ',';
        out += std::to_string(s.coord.grid.height) + ',';
        out += std::to_string(s.coord.agents) + ',';
        out += pattern_token(s.coord.pattern);
        out += ',';
        out += comm_token(s.coord.comm_interval) + ',';
        out += strategy_token(s.coord.strategy);
        out += ',';
        out += fmt_g6(s.coord.alpha) + ',';
        out += fmt_g6(s.coord.beta) + ',';
        out += std::to_string(s.trial_count) + ',';
        out += fmt_g6(s.success_rate) + ',';
        out += fmt_g6(s.success_stddev) + ',';
        out += fmt_g6(s.mean_steps_failures_as_max) + ',';
        out += s.mean_steps_successes_only ? fmt_g6(*s.mean_steps_successes_only) : "";
        out += '\n';
    }
    return out;
}

std::string wins_to_csv(std::span<const WinCell> wins, const std::string& feature_name) {
    std::string out = "feature,feature_value,strategy,success_wins,success_ties,efficiency_wins,"
                      "efficiency_ties\n";
    for (const WinCell& w : wins) {
        out += feature_name + ',' + w.feature_value + ',' + strategy_token(w.strategy) + ',' +
               std::to_string(w.success_wins) + ',' + std::to_string(w.success_ties) + ',' +
               std::to_string(w.efficiency_wins) + ',' + std::to_string(w.efficiency_ties) + '\n';
    }
    return out;
}

std::string grid_error_to_csv(std::span<const GridErrorRow> rows) {
    std::string out = "states,strategy,mean_objective_excess\n";
    for (const GridErrorRow& r : rows) {
        out += std::to_string(r.states) + ',' + r.strategy + ',' + fmt_g6(r.mean_excess) + '\n';
    }
    return out;
}

std::string report_markdown(std::span<const AggregateStats> stats, int max_steps) {
    (void)max_steps;
    std::ostringstream out;
    out << "# Sweep report\n\n";

    // Overall per-strategy summary.
    std::map<StrategyKind, std::vector<double>> success_by_strategy;
    for (const AggregateStats& s : stats) {
        success_by_strategy[s.coord.strategy].push_back(s.success_rate);
    }
    out << "## Overall performance\n\n";
    out << "| Strategy | Avg success | Std | Success wins (ties) | Efficiency wins (ties) |\n";
    out << "|---|---|---|---|---|\n";
    try {
        const auto overall = win_counts(stats, Feature::Overall, false);
        for (const WinCell& w : overall) {
            const auto& rates = success_by_strategy[w.strategy];
            out << "| " << strategy_token(w.strategy) << " | " << fmt_g6(mean(rates)) << " | "
                << fmt_g6(sample_stddev(rates)) << " | " << w.success_wins << " (" << w.success_ties
                << ") | " << w.efficiency_wins << " (" << w.efficiency_ties << ") |\n";
        }
    } catch (const MisalignedBlocks&) {
        out << "| (win counts unavailable: misaligned strategy blocks) | | | | |\n";
    }
    out << '\n';

    const std::pair<Feature, const char*> features[] = {
        {Feature::Agents, "Number of agents"},
        {Feature::Pattern, "Target pattern"},
        {Feature::CommInterval, "Communication interval"},
        {Feature::GridSize, "Grid size"},
        {Feature::Noise, "Noise profile"},
    };
    out << "## Efficiency wins by feature (comm extremes excluded)\n\n";
    for (const auto& [feature, title] : features) {
        out << "### " << title << "\n\n";
        try {
            const auto wins = win_counts(stats, feature, true);
            out << "| Value | Strategy | Success wins (ties) | Efficiency wins (ties) |\n";
            out << "|---|---|---|---|\n";
            for (const WinCell& w : wins) {
                out << "| " << w.feature_value << " | " << strategy_token(w.strategy) << " | "
                    << w.success_wins << " (" << w.success_ties << ") | " << w.efficiency_wins
                    << " (" << w.efficiency_ties << ") |\n";
            }
        } catch (const MisalignedBlocks&) {
            out << "(win counts unavailable: misaligned strategy blocks)\n";
        }
        out << '\n';
    }

    out << "## Per-configuration metrics\n\n";
    out << "| Grid | Agents | Pattern | k | Strategy | alpha | beta | Success rate | Mean steps "
           "(failures as T) | Mean steps (successes) |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|\n";
    for (const AggregateStats& s : stats) {
        out << "| " << grid_token(s.coord.grid) << " | " << s.coord.agents << " | "
            << pattern_token(s.coord.pattern) << " | " << comm_token(s.coord.comm_interval)
            << " | " << strategy_token(s.coord.strategy) << " | " << fmt_g6(s.coord.alpha) << " | "
            << fmt_g6(s.coord.beta) << " | " << fmt_g6(s.success_rate) << " | "
            << fmt_g6(s.mean_steps_failures_as_max) << " | "
            << (s.mean_steps_successes_only ? fmt_g6(*s.mean_steps_successes_only) : "-")
            << " |\n";
    }
    return std::move(out).str();
}

SweepSpec sweep_spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("sweep spec is not valid JSON: ") + e.what());
    }

    auto parse_grid = [](const nlohmann::json& g) -> GridShape {
        if (g.is_string()) {
            const std::string s = g.get<std::string>();
            const auto x = s.find('x');
            if (x == std::string::npos) throw ConfigInvalid("grid must look like \"15x15\"");
            return GridShape(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
        }
        if (g.is_array() && g.size() == 2) return GridShape(g[0].get<int>(), g[1].get<int>());
        throw ConfigInvalid("grid must be a \"WxH\" string or [W,H] pair");
    };

    SweepSpec spec;
    try {
        if (j.contains("grids")) {
            spec.grids.clear();
            for (const auto& g : j["grids"]) spec.grids.push_back(parse_grid(g));
        }
        if (j.contains("agents")) {
            spec.agent_counts = j["agents"].get<std::vector<int>>();
        }
        if (j.contains("patterns")) {
            spec.patterns.clear();
            for (const auto& p : j["patterns"]) {
                spec.patterns.push_back(pattern_from_token(p.get<std::string>()));
            }
        }
        if (j.contains("comm_intervals")) {
            spec.comm_intervals.clear();
            for (const auto& k : j["comm_intervals"]) {
                if (k.is_string()) {
                    spec.comm_intervals.push_back(comm_from_token(k.get<std::string>()));
                } else {
                    spec.comm_intervals.push_back(k.get<long>());
                }
            }
        }
        if (j.contains("strategies")) {
            spec.strategies.clear();
            for (const auto& s : j["strategies"]) {
                spec.strategies.push_back(strategy_from_token(s.get<std::string>()));
            }
        }
        if (j.contains("noise_profiles")) {
            spec.noise_profiles.clear();
            for (const auto& p : j["noise_profiles"]) {
                if (p.is_string()) {
                    spec.noise_profiles.push_back(named_noise_profile(p.get<std::string>()));
                } else {
                    NoiseProfile profile;
                    profile.alpha = p.at("alpha").get<double>();
                    profile.beta = p.at("beta").get<double>();
                    profile.name = p.value("name", noise_value_token(profile.alpha, profile.beta));
                    spec.noise_profiles.push_back(std::move(profile));
                }
            }
        }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            spec.solver.epsilon_floor = s.value("epsilon_floor", spec.solver.epsilon_floor);
            spec.solver.max_iterations = s.value("max_iterations", spec.solver.max_iterations);
            spec.solver.step_size = s.value("step_size", spec.solver.step_size);
            if (s.contains("quantization_levels")) {
                spec.solver.quantization_levels = s["quantization_levels"].get<int>();
            }
        }
        spec.trials_per_config = j.value("trials_per_config", spec.trials_per_config);
        spec.base_seed = j.value("base_seed", spec.base_seed);
        spec.parallelism = j.value("parallelism", spec.parallelism);
        spec.max_steps = j.value("max_steps", spec.max_steps);
        spec.horizon = j.value("horizon", spec.horizon);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("sweep spec field error: ") + e.what());
    }
    spec.validate();
    return spec;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace dectrack
