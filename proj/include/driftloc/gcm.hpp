#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftloc/flowfield.hpp"
#include "driftloc/gridworld.hpp"

namespace driftloc {

/// Which cells a non-boundary cell may be mapped into besides its Euler image.
///
/// `flow_cone`: the image, the two king moves 45 degrees either side of the
/// image heading, and the cell itself. A cell whose image is itself spreads to
/// every admissible action.
///
/// `all_actions`: every admissible action (neighbors ∪ self).
///
/// Boundary cells are uniform over neighbors ∪ self under both rules.
enum class MappedSetRule { flow_cone, all_actions };

std::string_view to_string(MappedSetRule rule);
MappedSetRule parse_mapped_set_rule(std::string_view name);

struct Transition {
    std::uint32_t to = 0;  // state id
    double p = 0.0;
};

/// Row-stochastic sparse matrix over the free-cell enumeration of a workspace.
/// Each row lists its nonzeros in increasing state order.
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    TransitionMatrix(std::vector<CellIndex> cells, std::vector<std::uint32_t> row_start, std::vector<Transition> entries);

    std::size_t size() const noexcept { return cells_.size(); }
    std::span<const Transition> row(std::size_t state) const {
        return {entries_.data() + row_start_[state], entries_.data() + row_start_[state + 1]};
    }
    /// P[from][to], zero if absent.
    double at(std::size_t from, std::size_t to) const;
    CellIndex cell(std::size_t state) const { return cells_.at(state); }
    std::span<const CellIndex> cells() const noexcept { return cells_; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }

private:
    std::vector<CellIndex> cells_;
    std::vector<std::uint32_t> row_start_;
    std::vector<Transition> entries_;
};

/// Mapped sets A(z) with probabilities. Stored as a transition matrix over states.
struct StochasticCellMap {
    double r = 1.0;
    MappedSetRule rule = MappedSetRule::flow_cone;
    TransitionMatrix mapping;
};

/// Throws ParameterError unless 0 < r <= 1.
StochasticCellMap build_stochastic_map(const Workspace& w, const CellMap& cm, double r,
                                       MappedSetRule rule = MappedSetRule::flow_cone);

/// Mapped set of one cell as (cell, probability) pairs in increasing cell order.
std::vector<std::pair<CellIndex, double>> mapped_set(const Workspace& w, const StochasticCellMap& s, CellIndex z);

TransitionMatrix transition_matrix(const StochasticCellMap& s);

/// Maximal strongly connected components of P's support graph, as state ids.
/// Members are sorted; components are ordered by smallest member.
std::vector<std::vector<std::uint32_t>> strongly_connected_components(const TransitionMatrix& p);

/// Transitive closure of P's support: reaches(i, j) iff j is reachable from i
/// in one or more steps.
class Reachability {
public:
    Reachability() = default;
    explicit Reachability(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

    std::size_t size() const noexcept { return n_; }
    bool reaches(std::size_t i, std::size_t j) const { return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u; }
    void set(std::size_t i, std::size_t j) { bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64); }
    std::span<std::uint64_t> row_words(std::size_t i) { return {bits_.data() + i * words_, words_}; }
    std::span<const std::uint64_t> row_words(std::size_t i) const { return {bits_.data() + i * words_, words_}; }

    friend bool operator==(const Reachability&, const Reachability&) = default;

private:
    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

/// Closure via reachability over the condensation DAG.
Reachability reachability(const TransitionMatrix& p);
/// Same, reusing already computed components.
Reachability reachability(const TransitionMatrix& p, const std::vector<std::vector<std::uint32_t>>& sccs);

/// Closed components: every cell reachable from a member is a member.
std::vector<std::vector<std::uint32_t>> find_persistent_groups(const std::vector<std::vector<std::uint32_t>>& sccs,
                                                               const Reachability& c);

struct TransientGroup {
    std::vector<int> domicile;          // 1-based persistent group numbers, sorted
    std::vector<std::uint32_t> states;  // sorted
};

/// Groups transient states by the set of persistent groups they lead to.
/// Throws InternalInconsistency if a transient state reaches no persistent group.
std::vector<TransientGroup> find_transient_groups(const std::vector<std::vector<std::uint32_t>>& persistent,
                                                  std::span<const std::uint32_t> transient_states,
                                                  const Reachability& c);

/// Long-term structure of the chain, expressed in cell indices.
struct FlowDecomposition {
    struct Group {
        std::string label;              // "B_1" for attractors, "B(1,2)" for transient groups
        std::vector<int> domicile;      // empty for persistent groups
        std::vector<CellIndex> cells;   // sorted
    };

    std::vector<Group> persistent_groups;
    std::vector<Group> transient_groups;  // ordered by (domicile size, domicile)
    std::vector<CellIndex> persistent_cells;
    std::vector<CellIndex> transient_cells;

    /// Label of the group that contains z; throws IndexOutOfRange if none does.
    const Group& group_of(CellIndex z) const;
    /// Every group, persistent first.
    std::vector<const Group*> all_groups() const;
};

FlowDecomposition decompose(const TransitionMatrix& p);

std::string persistent_label(int group);
std::string transient_label(std::span<const int> domicile);

}  // namespace driftloc
