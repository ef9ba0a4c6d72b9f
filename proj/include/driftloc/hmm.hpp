#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftloc/gcm.hpp"
#include "driftloc/gridworld.hpp"

namespace driftloc {

using ObservationHistory = std::vector<Direction>;
using StateTrajectory = std::vector<CellIndex>;

/// Whitespace- or comma-separated symbols over {N,NE,E,SE,S,SW,W,NW,I}.
/// Throws ParseError (line 1, naming the token position) on unknown symbols.
ObservationHistory parse_observations(std::string_view text);
std::string format_observations(std::span<const Direction> obs);

/// Q[s][y]: probability that the move leaving state s has compass heading y.
class EmissionMatrix {
public:
    using Row = std::array<double, kDirectionCount>;

    EmissionMatrix() = default;
    explicit EmissionMatrix(std::vector<Row> rows) : rows_(std::move(rows)) {}

    std::size_t size() const noexcept { return rows_.size(); }
    const Row& row(std::size_t state) const { return rows_.at(state); }
    double at(std::size_t state, Direction y) const { return rows_.at(state)[index_of(y)]; }

private:
    std::vector<Row> rows_;
};

/// Sums the mapped-set probabilities of each state by the direction of the move.
EmissionMatrix emission_matrix(const StochasticCellMap& s, const Workspace& w);

enum class PriorMode { deterministic, probabilistic };

std::string_view to_string(PriorMode mode);
/// Accepts "det"/"deterministic" and "prob"/"probabilistic".
PriorMode parse_prior_mode(std::string_view name);

/// Point mass at x_I, or uniform over x_I and its water neighbors. Indexed by state.
std::vector<double> initial_distribution(const Workspace& w, CellIndex x_init, PriorMode mode);

/// λ = (P, Q, π). Throws DimensionError or ParameterError when inconsistent.
struct HmmModel {
    HmmModel(TransitionMatrix p, EmissionMatrix q, std::vector<double> pi);

    TransitionMatrix transitions;
    EmissionMatrix emissions;
    std::vector<double> prior;
};

struct DecodedPath {
    StateTrajectory path;  // T + 1 cells
    double log_prob = 0.0;
};

/// Most likely state sequence for `obs`, scoring
///   π[x0] · Π_t Q[x_{t-1}][y_t] · P[x_{t-1}][x_t].
/// Among optimal sequences the lexicographically smallest (by cell index) wins.
/// Throws ZeroProbabilityError naming the first observation no feasible state can emit.
/// The backward recursion is parallel over states.
DecodedPath viterbi(const HmmModel& model, std::span<const Direction> obs);
/// Single-threaded reference; identical results.
DecodedPath viterbi_serial(const HmmModel& model, std::span<const Direction> obs);

CellIndex viterbi_final_state(const HmmModel& model, std::span<const Direction> obs);

/// Joint log-probability of a given trajectory and observations under λ (−inf if impossible).
double path_log_probability(const HmmModel& model, std::span<const CellIndex> path, std::span<const Direction> obs);

}  // namespace driftloc
