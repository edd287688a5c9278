#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dectrack/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

dectrack::GridShape parse_grid_arg(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) {
        throw dectrack::ConfigInvalid("grid must look like \"15x15\", got: " + s);
    }
    return dectrack::GridShape(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
}

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct RunArgs {
    std::string grid = "10x10";
    int agents = 2;
    std::string pattern = "stationary";
    std::string comm = "5";
    std::string strategy = "visit_weighted";
    std::optional<std::string> noise;
    double alpha = 0.1;
    double beta = 0.2;
    std::uint64_t seed = 0;
    int max_steps = 2500;
    int horizon = 3;
};

int cmd_run(const RunArgs& args) {
    dectrack::SimConfig cfg;
    cfg.shape = parse_grid_arg(args.grid);
    cfg.num_agents = args.agents;
    double alpha = args.alpha;
    double beta = args.beta;
    if (args.noise) {
        const dectrack::NoiseProfile profile = dectrack::named_noise_profile(*args.noise);
        alpha = profile.alpha;
        beta = profile.beta;
    }
    cfg.sensor = dectrack::SensorModel(alpha, beta);
    cfg.comm_interval = dectrack::comm_from_token(args.comm);
    cfg.max_steps = args.max_steps;
    cfg.plan.horizon = args.horizon;
    cfg.strategy.kind = dectrack::strategy_from_token(args.strategy);
    const auto pattern = dectrack::pattern_from_token(args.pattern);
    cfg.target_policy = pattern == dectrack::TargetPolicy::Kind::Patrol
                            ? dectrack::TargetPolicy::corner_patrol(cfg.shape)
                            : dectrack::TargetPolicy{pattern, {}};
    cfg.seed = args.seed;
    cfg.validate();

    const dectrack::TrialRecord record = dectrack::run_trial(cfg);
    std::cout << "success=" << (record.success ? 1 : 0) << '\n';
    std::cout << "steps="
              << (record.steps_to_discovery ? std::to_string(*record.steps_to_discovery) : "-")
              << '\n';
    std::cout << "seed=" << record.seed << '\n';
    std::cout << "config_digest=" << record.config_digest << '\n';
    std::cout << "error_flag=" << (record.error_flag ? 1 : 0) << '\n';
    std::cout << "duration_ms=" << fmt_g6(record.duration_ms) << '\n';
    return kExitOk;
}

struct SweepArgs {
    std::string spec_path;
    std::optional<int> parallelism;
    std::optional<int> trials;
    std::optional<std::uint64_t> base_seed;
    std::optional<int> max_steps;
    std::string records_out = "records.csv";
    std::string stats_out = "stats.csv";
    std::string report_out = "report.md";
};

int cmd_sweep(const SweepArgs& args) {
    dectrack::SweepSpec spec;
    if (!args.spec_path.empty()) {
        spec = dectrack::sweep_spec_from_json(dectrack::read_text_file(args.spec_path));
    }
    if (args.parallelism) spec.parallelism = *args.parallelism;
    if (args.trials) spec.trials_per_config = *args.trials;
    if (args.base_seed) spec.base_seed = *args.base_seed;
    if (args.max_steps) spec.max_steps = *args.max_steps;
    spec.validate();

    const auto records = dectrack::run_sweep(spec);
    const auto stats = dectrack::aggregate(records, spec.max_steps);
    dectrack::write_text_file(args.records_out, dectrack::records_to_csv(records));
    dectrack::write_text_file(args.stats_out, dectrack::stats_to_csv(stats));
    dectrack::write_text_file(args.report_out, dectrack::report_markdown(stats, spec.max_steps));
    std::cout << records.size() << " trials -> " << args.records_out << ", " << args.stats_out
              << ", " << args.report_out << '\n';
    return kExitOk;
}

struct GridErrorArgs {
    std::vector<std::string> sizes = {"10x10", "32x32", "100x100"};
    int trials = 20;
    std::uint64_t seed = 0;
    int agents = 2;
    double epsilon_floor = 1e-5;
    int max_iterations = 2000;
    double step_size = 0.1;
    std::optional<int> quantization_levels;
    std::string out = "grid_error.csv";
};

int cmd_grid_error(const GridErrorArgs& args) {
    std::vector<dectrack::GridShape> shapes;
    for (const std::string& s : args.sizes) shapes.push_back(parse_grid_arg(s));
    dectrack::SolverParams params;
    params.epsilon_floor = args.epsilon_floor;
    params.max_iterations = args.max_iterations;
    params.step_size = args.step_size;
    params.quantization_levels = args.quantization_levels;

    const auto rows =
        dectrack::grid_error_experiment(shapes, args.trials, params, args.seed, args.agents);
    dectrack::write_text_file(args.out, dectrack::grid_error_to_csv(rows));
    std::cout << rows.size() << " rows -> " << args.out << '\n';
    return kExitOk;
}

struct ReportArgs {
    std::string records_in;
    int max_steps = 2500;
    std::string stats_out = "stats.csv";
    std::string report_out = "report.md";
};

int cmd_report(const ReportArgs& args) {
    const auto records = dectrack::records_from_csv(dectrack::read_text_file(args.records_in));
    const auto stats = dectrack::aggregate(records, args.max_steps);
    dectrack::write_text_file(args.stats_out, dectrack::stats_to_csv(stats));
    dectrack::write_text_file(args.report_out, dectrack::report_markdown(stats, args.max_steps));
    std::cout << stats.size() << " configurations -> " << args.stats_out << ", "
              << args.report_out << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized multi-agent target tracking experiments"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run a single trial and print its record");
    run->add_option("--grid", run_args.grid, "Grid as WxH");
    run->add_option("--agents", run_args.agents, "Number of agents");
    run->add_option("--pattern", run_args.pattern,
                    "Target pattern: stationary|random_walk|evasive|patrol");
    run->add_option("--comm", run_args.comm, "Merge interval k (integer, or 'inf' to never merge)");
    run->add_option("--strategy", run_args.strategy,
                    "Merge strategy: arithmetic_mean|geometric_mean|visit_weighted|"
                    "numeric_forward_kl|numeric_reverse_kl");
    std::string noise_name;
    CLI::Option* noise_opt = run->add_option(
        "--noise", noise_name, "Named noise profile (overrides --alpha/--beta)");
    run->add_option("--alpha", run_args.alpha, "False-positive rate");
    run->add_option("--beta", run_args.beta, "False-negative rate");
    run->add_option("--seed", run_args.seed, "Trial seed");
    run->add_option("--max-steps", run_args.max_steps, "Step budget");
    run->add_option("--horizon", run_args.horizon, "Planner lookahead depth");

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a configured sweep and emit reports");
    sweep->add_option("--spec", sweep_args.spec_path, "JSON sweep spec file")
        ->check(CLI::ExistingFile);
    std::optional<int> sweep_parallelism, sweep_trials, sweep_max_steps;
    std::optional<std::uint64_t> sweep_seed;
    sweep->add_option("--parallelism", sweep_parallelism, "Worker pool size (overrides file)");
    sweep->add_option("--trials", sweep_trials, "Trials per configuration (overrides file)");
    sweep->add_option("--base-seed", sweep_seed, "Base seed (overrides file)");
    sweep->add_option("--max-steps", sweep_max_steps, "Step budget (overrides file)");
    sweep->add_option("--records-out", sweep_args.records_out, "Records CSV path");
    sweep->add_option("--stats-out", sweep_args.stats_out, "Stats CSV path");
    sweep->add_option("--report-out", sweep_args.report_out, "Markdown report path");

    GridErrorArgs ge_args;
    CLI::App* ge = app.add_subcommand("grid-error",
                                      "Numeric-vs-analytic merge error as grid area scales");
    ge->add_option("--sizes", ge_args.sizes, "Grid sizes as WxH (repeatable)");
    ge->add_option("--trials", ge_args.trials, "Belief draws per size");
    ge->add_option("--seed", ge_args.seed, "RNG seed");
    ge->add_option("--agents", ge_args.agents, "Beliefs per draw");
    ge->add_option("--epsilon-floor", ge_args.epsilon_floor, "Solver probability floor");
    ge->add_option("--max-iterations", ge_args.max_iterations, "Solver iteration cap");
    ge->add_option("--step-size", ge_args.step_size, "Solver initial step size");
    std::optional<int> ge_quant;
    ge->add_option("--quantization-levels", ge_quant, "Piecewise-linear log table size");
    ge->add_option("--out", ge_args.out, "Output CSV path");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Re-aggregate an existing records CSV");
    report->add_option("--records", report_args.records_in, "Records CSV to aggregate")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--max-steps", report_args.max_steps, "Step budget used for the records");
    report->add_option("--stats-out", report_args.stats_out, "Stats CSV path");
    report->add_option("--report-out", report_args.report_out, "Markdown report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*run) {
            if (*noise_opt) run_args.noise = noise_name;
            return cmd_run(run_args);
        }
        if (*sweep) {
            sweep_args.parallelism = sweep_parallelism;
            sweep_args.trials = sweep_trials;
            sweep_args.base_seed = sweep_seed;
            sweep_args.max_steps = sweep_max_steps;
            return cmd_sweep(sweep_args);
        }
        if (*ge) {
            ge_args.quantization_levels = ge_quant;
            return cmd_grid_error(ge_args);
        }
        if (*report) return cmd_report(report_args);
    } catch (const dectrack::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
