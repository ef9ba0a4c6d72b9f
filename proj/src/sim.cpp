#include "driftloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "driftloc/errors.hpp"

namespace driftloc {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t condition, std::uint64_t run) {
    return splitmix64(splitmix64(base_seed ^ splitmix64(condition)) + run);
}

double uniform01(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample_index(Engine& rng, std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double target = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;
}

namespace {

std::uint32_t step_chain(const TransitionMatrix& p, std::uint32_t from, Engine& rng) {
    const auto row = p.row(from);
    const double target = uniform01(rng);
    double acc = 0.0;
    for (const Transition& t : row) {
        acc += t.p;
        if (target < acc) return t.to;
    }
    return row.back().to;
}

}  // namespace

SampledTrajectory sample_trajectory(const Workspace& w, const TransitionMatrix& p, std::span<const double> pi,
                                    std::size_t steps, Engine& rng, double noise_rate) {
    if (steps == 0) throw ParameterError("trajectory needs at least one step");
    if (pi.size() != p.size()) throw DimensionError("initial distribution does not match the transition matrix");
    SampledTrajectory out;
    out.path.reserve(steps + 1);
    out.observations.reserve(steps);
    auto state = static_cast<std::uint32_t>(sample_index(rng, pi));
    out.path.push_back(p.cell(state));
    std::vector<Direction> others;
    for (std::size_t t = 0; t < steps; ++t) {
        const std::uint32_t from = state;
        state = step_chain(p, state, rng);
        const CellIndex next = p.cell(state);
        Direction y = direction_between(w, out.path.back(), next);
        if (noise_rate > 0.0 && uniform01(rng) < noise_rate) {
            // Flip to another heading the chain can take from here, so the
            // history stays explainable.
            others.clear();
            for (const Transition& tr : p.row(from)) {
                const Direction d = direction_between(w, p.cell(from), p.cell(tr.to));
                if (d != y) others.push_back(d);
            }
            if (!others.empty()) {
                y = others[std::min(others.size() - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(others.size())))];
            }
        }
        out.path.push_back(next);
        out.observations.push_back(y);
    }
    return out;
}

SampledTrajectory sample_trajectory(const Workspace& w, const TransitionMatrix& p, std::span<const double> pi,
                                    std::size_t steps, std::uint64_t seed, double noise_rate) {
    Engine rng(seed);
    return sample_trajectory(w, p, pi, steps, rng, noise_rate);
}

ErrorReport error_report(std::span<const CellIndex> truth, std::span<const CellIndex> decoded, const Workspace& w) {
    if (truth.size() != decoded.size() || truth.empty()) {
        throw DimensionError("true path has " + std::to_string(truth.size()) + " cells, decoded path has " +
                             std::to_string(decoded.size()));
    }
    ErrorReport out;
    for (std::size_t t = 1; t < truth.size(); ++t) out.trajectory_error += cell_distance(w, truth[t], decoded[t]);
    out.final_error = cell_distance(w, truth.back(), decoded.back());
    return out;
}

std::optional<std::uint32_t> first_absorbing_hit(const TransitionMatrix& p, std::uint32_t start,
                                                 std::span<const char> absorbing, std::size_t max_steps, Engine& rng) {
    std::uint32_t state = start;
    for (std::size_t t = 0; t < max_steps; ++t) {
        state = step_chain(p, state, rng);
        if (absorbing[state]) return state;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> issues;
    if (field_path.empty() == synthetic.empty()) issues.push_back("exactly one of field / synthetic must be set");
    if (!(r > 0.0 && r <= 1.0)) issues.push_back("r must lie in (0, 1]");
    if (dt && !(*dt > 0.0 && std::isfinite(*dt))) issues.push_back("dt must be positive");
    if (modes.empty()) issues.push_back("at least one prior mode is required");
    if (steps.empty()) issues.push_back("at least one observation length is required");
    for (int t : steps) {
        if (t < 1) issues.push_back("observation length " + std::to_string(t) + " must be >= 1");
    }
    if (runs < 1) issues.push_back("runs must be >= 1");
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) issues.push_back("noise_rate must lie in [0, 1]");
    if (csv_output.empty()) issues.push_back("csv output path is empty");
    if (json_output.empty()) issues.push_back("json output path is empty");
    if (!issues.empty()) throw ConfigError(std::move(issues));
}

Summary summarize(std::vector<double> values) {
    Summary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    s.min = values.front();
    s.max = values.back();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    if (n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

FlowModel build_flow_model(GriddedField data, double r, std::optional<double> dt, MappedSetRule rule) {
    const EulerStep step = dt ? EulerStep(*dt) : default_time_step(data.workspace, data.field);
    CellMap cm = build_cell_map(data.workspace, data.field, step);
    StochasticCellMap s = build_stochastic_map(data.workspace, cm, r, rule);
    EmissionMatrix q = emission_matrix(s, data.workspace);
    FlowDecomposition d = decompose(s.mapping);
    return {std::move(data), step, std::move(cm), std::move(s), std::move(q), std::move(d)};
}

GriddedField load_field_source(const ExperimentConfig& cfg, const std::string& base_dir) {
    if (!cfg.field_path.empty()) {
        std::filesystem::path path(cfg.field_path);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        return load_field(path);
    }
    int rows = 21, cols = 29;
    const auto spec = parse_synthetic_spec(cfg.synthetic, &rows, &cols);
    return synthesize_field(spec, rows, cols);
}

namespace {

struct ConditionPlan {
    std::string label;
    std::string region;
    PriorMode mode;
    int steps;
    std::vector<CellIndex> deployable;
};

std::vector<CellIndex> deployable_cells(const Workspace& w, std::span<const CellIndex> cells) {
    std::vector<CellIndex> out;
    for (CellIndex z : cells) {
        if (!w.is_boundary(z)) out.push_back(z);
    }
    if (out.empty()) out.assign(cells.begin(), cells.end());
    return out;
}

SimulationRun simulate_one(const FlowModel& model, const ConditionPlan& plan, std::uint64_t seed, double noise_rate) {
    const Workspace& w = model.data.workspace;
    Engine rng(seed);
    SimulationRun run;
    run.seed = seed;
    run.deployment = plan.deployable[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(plan.deployable.size()))];
    auto pi = initial_distribution(w, run.deployment, plan.mode);
    auto sample = sample_trajectory(w, model.stochastic.mapping, pi, static_cast<std::size_t>(plan.steps), rng, noise_rate);
    run.true_path = std::move(sample.path);
    run.observations = std::move(sample.observations);

    const HmmModel hmm(model.stochastic.mapping, model.emissions, std::move(pi));
    auto decoded = viterbi_serial(hmm, run.observations);
    run.decoded_path = std::move(decoded.path);
    run.log_prob = decoded.log_prob;
    run.errors = error_report(run.true_path, run.decoded_path, w);
    return run;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const FlowModel& model, Execution execution) {
    cfg.validate();
    const Workspace& w = model.data.workspace;

    std::vector<ConditionPlan> plans;
    auto add_plans = [&](const std::string& region, const std::vector<CellIndex>& deployable) {
        for (int t : cfg.steps) {
            for (PriorMode mode : cfg.modes) {
                std::string label = region.empty() ? "T=" + std::to_string(t) + "/" + std::string(to_string(mode))
                                                   : region;
                if (!region.empty() && (cfg.steps.size() > 1 || cfg.modes.size() > 1)) {
                    label += "/T=" + std::to_string(t) + "/" + std::string(to_string(mode));
                }
                plans.push_back({label, region, mode, t, deployable});
            }
        }
    };
    if (cfg.by_region) {
        for (const auto* group : model.decomposition.all_groups()) {
            add_plans(group->label, deployable_cells(w, group->cells));
        }
    } else {
        add_plans("", deployable_cells(w, w.free_cells()));
    }

    ExperimentResult result{cfg, {}};
    result.conditions.resize(plans.size());
    const auto runs = static_cast<std::size_t>(cfg.runs);
    for (std::size_t c = 0; c < plans.size(); ++c) {
        auto& cond = result.conditions[c];
        cond.index = c;
        cond.label = plans[c].label;
        cond.region = plans[c].region;
        cond.mode = plans[c].mode;
        cond.steps = plans[c].steps;
        cond.runs.resize(runs);
    }

    // Flattened (condition, run) loop; each slot is written by exactly one iteration.
    const auto total = static_cast<std::ptrdiff_t>(plans.size() * runs);
    const bool parallel = execution == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t k = 0; k < total; ++k) {
        const auto c = static_cast<std::size_t>(k) / runs;
        const auto i = static_cast<std::size_t>(k) % runs;
        result.conditions[c].runs[i] = simulate_one(model, plans[c], run_seed(cfg.base_seed, c, i), cfg.noise_rate);
    }

    for (auto& cond : result.conditions) {
        std::vector<double> finals, trajectories;
        for (const auto& run : cond.runs) {
            finals.push_back(run.errors.final_error);
            trajectories.push_back(run.errors.trajectory_error);
        }
        cond.final_error = summarize(std::move(finals));
        cond.trajectory_error = summarize(std::move(trajectories));
    }
    return result;
}

}  // namespace driftloc
