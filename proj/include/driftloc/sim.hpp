#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "driftloc/gcm.hpp"
#include "driftloc/hmm.hpp"
#include "driftloc/ingest.hpp"

namespace driftloc {

// ---------------------------------------------------------------------------
// Random streams
//
// Every run owns an std::mt19937_64 seeded with
//   seed = mix(mix(base_seed ^ mix(condition)) + run)
// where mix is the SplitMix64 finalizer. Uniform variates take the top 53
// bits of one engine output, so streams are identical across platforms.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t condition, std::uint64_t run);

using Engine = std::mt19937_64;

double uniform01(Engine& rng);
/// Index drawn from non-negative weights (need not be normalized).
std::size_t sample_index(Engine& rng, std::span<const double> weights);

struct SampledTrajectory {
    StateTrajectory path;          // T + 1 cells
    ObservationHistory observations;  // T symbols
};

/// x0 ~ π, x_t ~ P[x_{t-1}], y_t = heading of the move. With `noise_rate` > 0
/// each symbol is replaced, with that probability, by another heading drawn
/// uniformly from the moves P allows out of x_{t-1} (if there is one).
SampledTrajectory sample_trajectory(const Workspace& w, const TransitionMatrix& p, std::span<const double> pi,
                                    std::size_t steps, Engine& rng, double noise_rate = 0.0);
SampledTrajectory sample_trajectory(const Workspace& w, const TransitionMatrix& p, std::span<const double> pi,
                                    std::size_t steps, std::uint64_t seed, double noise_rate = 0.0);

struct ErrorReport {
    double final_error = 0.0;       // cell units
    double trajectory_error = 0.0;  // summed over t = 1..T
};

/// Throws DimensionError when the paths differ in length.
ErrorReport error_report(std::span<const CellIndex> truth, std::span<const CellIndex> decoded, const Workspace& w);

/// Steps the chain from `start` until it enters a state flagged in `absorbing`
/// or `max_steps` elapse. Returns the entered state, if any.
std::optional<std::uint32_t> first_absorbing_hit(const TransitionMatrix& p, std::uint32_t start,
                                                 std::span<const char> absorbing, std::size_t max_steps, Engine& rng);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    std::string name = "experiment";
    std::string field_path;       // either a field file ...
    std::string synthetic;        // ... or a synthetic spec such as "double_gyre:rows=21,cols=29"
    double r = 0.9;
    std::optional<double> dt;     // nullopt: one cell per step at the fastest current
    MappedSetRule rule = MappedSetRule::flow_cone;
    std::vector<PriorMode> modes{PriorMode::deterministic};
    std::vector<int> steps{20, 40, 60, 80, 100};
    int runs = 50;
    bool by_region = false;
    std::uint64_t base_seed = 1;
    double noise_rate = 0.0;
    std::string csv_output = "results.csv";
    std::string json_output = "results.json";

    /// Throws ConfigError listing every problem.
    void validate() const;
};

enum class Execution { parallel, serial };

struct Summary {
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;  // sample standard deviation (n - 1)
    double min = 0.0;
    double max = 0.0;
};

Summary summarize(std::vector<double> values);

struct SimulationRun {
    std::uint64_t seed = 0;
    CellIndex deployment;  // x_I
    StateTrajectory true_path;
    ObservationHistory observations;
    StateTrajectory decoded_path;
    double log_prob = 0.0;
    ErrorReport errors;
};

struct ConditionResult {
    std::size_t index = 0;
    std::string label;
    std::string region;  // empty unless grouped by region
    PriorMode mode = PriorMode::deterministic;
    int steps = 0;
    std::vector<SimulationRun> runs;
    Summary final_error;
    Summary trajectory_error;
};

/// Everything derived from one field and one r.
struct FlowModel {
    GriddedField data;
    EulerStep dt{1.0};
    CellMap cell_map;
    StochasticCellMap stochastic;
    EmissionMatrix emissions;
    FlowDecomposition decomposition;
};

FlowModel build_flow_model(GriddedField data, double r, std::optional<double> dt = std::nullopt,
                           MappedSetRule rule = MappedSetRule::flow_cone);

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ConditionResult> conditions;
};

/// Resolves the config's field source (relative paths against `base_dir`).
GriddedField load_field_source(const ExperimentConfig& cfg, const std::string& base_dir = ".");

/// Deployment cells are drawn uniformly from the non-boundary water cells of
/// the grid (or of the region); a region made only of boundary cells uses all its cells.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const FlowModel& model,
                                Execution execution = Execution::parallel);

}  // namespace driftloc
