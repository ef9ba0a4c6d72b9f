#include "driftloc/gcm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "driftloc/errors.hpp"

namespace driftloc {

std::string_view to_string(MappedSetRule rule) {
    switch (rule) {
        case MappedSetRule::flow_cone: return "flow_cone";
        case MappedSetRule::all_actions: return "all_actions";
    }
    return "?";
}

MappedSetRule parse_mapped_set_rule(std::string_view name) {
    if (name == "flow_cone") return MappedSetRule::flow_cone;
    if (name == "all_actions") return MappedSetRule::all_actions;
    throw ParameterError("unknown mapped-set rule '" + std::string(name) + "'");
}

TransitionMatrix::TransitionMatrix(std::vector<CellIndex> cells, std::vector<std::uint32_t> row_start,
                                   std::vector<Transition> entries)
    : cells_(std::move(cells)), row_start_(std::move(row_start)), entries_(std::move(entries)) {
    if (row_start_.size() != cells_.size() + 1 || row_start_.back() != entries_.size()) {
        throw DimensionError("transition matrix row offsets do not match its entries");
    }
}

double TransitionMatrix::at(std::size_t from, std::size_t to) const {
    for (const Transition& t : row(from)) {
        if (t.to == to) return t.p;
    }
    return 0.0;
}

namespace {

std::vector<CellIndex> candidate_set(const Workspace& w, CellIndex z, CellIndex image, MappedSetRule rule) {
    std::vector<CellIndex> set = neighbors(w, z);
    set.push_back(z);
    if (rule == MappedSetRule::all_actions || image == z) return set;

    // Flow cone: image, its two 45-degree rotations, and the idle move.
    const auto heading = static_cast<int>(index_of(direction_between(w, z, image)));
    const GridPos p = w.position(z);
    std::vector<CellIndex> cone{image, z};
    for (int turn : {-1, 1}) {
        const auto d = static_cast<Direction>((heading + turn + 8) % 8);
        const Offset o = offset_of(d);
        const GridPos q{p.row + o.drow, p.col + o.dcol};
        if (!w.in_bounds(q)) continue;
        const CellIndex c = w.cell_at(q);
        if (!w.is_land(c)) cone.push_back(c);
    }
    return cone;
}

}  // namespace

StochasticCellMap build_stochastic_map(const Workspace& w, const CellMap& cm, double r, MappedSetRule rule) {
    if (!(r > 0.0 && r <= 1.0)) throw ParameterError("perfect-motion probability r must lie in (0, 1]");
    if (cm.size() != w.free_count()) {
        throw DimensionError("cell map covers " + std::to_string(cm.size()) + " cells, workspace has " +
                             std::to_string(w.free_count()) + " water cells");
    }

    std::vector<std::uint32_t> row_start{0};
    std::vector<Transition> entries;
    entries.reserve(w.free_count() * 9);
    std::vector<std::pair<CellIndex, double>> row;

    for (std::size_t s = 0; s < w.free_count(); ++s) {
        const CellIndex z = w.cell_of_state(s);
        const CellIndex image = cm.image_of_state(s);
        if (w.is_land(image)) throw LandCellError("cell map sends cell " + std::to_string(z.value) + " onto land");
        row.clear();
        if (w.is_boundary(z)) {
            auto set = neighbors(w, z);
            set.push_back(z);
            const double p = 1.0 / static_cast<double>(set.size());
            for (CellIndex c : set) row.emplace_back(c, p);
        } else if (r == 1.0) {
            (void)direction_between(w, z, image);  // image must be a king move
            row.emplace_back(image, 1.0);
        } else {
            const auto set = candidate_set(w, z, image, rule);
            if (set.size() == 1) {
                row.emplace_back(image, 1.0);
            } else {
                const double spread = (1.0 - r) / static_cast<double>(set.size() - 1);
                for (CellIndex c : set) row.emplace_back(c, c == image ? r : spread);
            }
        }
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [c, p] : row) entries.push_back({static_cast<std::uint32_t>(w.state_of(c)), p});
        row_start.push_back(static_cast<std::uint32_t>(entries.size()));
    }

    const auto cells = w.free_cells();
    return {r, rule, TransitionMatrix({cells.begin(), cells.end()}, std::move(row_start), std::move(entries))};
}

std::vector<std::pair<CellIndex, double>> mapped_set(const Workspace& w, const StochasticCellMap& s, CellIndex z) {
    std::vector<std::pair<CellIndex, double>> out;
    for (const Transition& t : s.mapping.row(w.state_of(z))) out.emplace_back(s.mapping.cell(t.to), t.p);
    return out;
}

TransitionMatrix transition_matrix(const StochasticCellMap& s) { return s.mapping; }

std::vector<std::vector<std::uint32_t>> strongly_connected_components(const TransitionMatrix& p) {
    // Iterative Tarjan.
    const std::size_t n = p.size();
    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> call;  // (state, next edge offset)
    std::vector<std::vector<std::uint32_t>> sccs;
    std::uint32_t counter = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, edge] = call.back();
            if (edge == 0 && index[v] == kUnvisited) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            const auto out = p.row(v);
            if (edge < out.size()) {
                const std::uint32_t w = out[edge++].to;
                if (index[w] == kUnvisited) {
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::uint32_t> comp;
                std::uint32_t x;
                do {
                    x = stack.back();
                    stack.pop_back();
                    on_stack[x] = 0;
                    comp.push_back(x);
                } while (x != done);
                std::sort(comp.begin(), comp.end());
                sccs.push_back(std::move(comp));
            }
        }
    }
    std::sort(sccs.begin(), sccs.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return sccs;
}

Reachability reachability(const TransitionMatrix& p) { return reachability(p, strongly_connected_components(p)); }

Reachability reachability(const TransitionMatrix& p, const std::vector<std::vector<std::uint32_t>>& sccs) {
    const std::size_t n = p.size();
    const std::size_t k = sccs.size();
    std::vector<std::uint32_t> comp(n);
    for (std::uint32_t c = 0; c < k; ++c) {
        for (auto s : sccs[c]) comp[s] = c;
    }

    // Condensation edges, then a topological order with sinks first (Kahn on out-degree).
    std::vector<std::vector<std::uint32_t>> succ(k);
    std::vector<char> cyclic(k, 0);
    for (std::uint32_t c = 0; c < k; ++c) {
        if (sccs[c].size() > 1) cyclic[c] = 1;
        for (auto s : sccs[c]) {
            for (const Transition& t : p.row(s)) {
                if (comp[t.to] == c) {
                    cyclic[c] = 1;
                } else {
                    succ[c].push_back(comp[t.to]);
                }
            }
        }
        std::sort(succ[c].begin(), succ[c].end());
        succ[c].erase(std::unique(succ[c].begin(), succ[c].end()), succ[c].end());
    }
    std::vector<std::vector<std::uint32_t>> pred(k);
    std::vector<std::size_t> pending(k);
    for (std::uint32_t c = 0; c < k; ++c) {
        pending[c] = succ[c].size();
        for (auto d : succ[c]) pred[d].push_back(c);
    }
    std::vector<std::uint32_t> order;
    order.reserve(k);
    for (std::uint32_t c = 0; c < k; ++c) {
        if (pending[c] == 0) order.push_back(c);
    }
    for (std::size_t head = 0; head < order.size(); ++head) {
        for (auto c : pred[order[head]]) {
            if (--pending[c] == 0) order.push_back(c);
        }
    }
    if (order.size() != k) throw InternalInconsistency("condensation graph is not acyclic");

    // One bit row per component, filled sinks first.
    std::vector<std::vector<std::uint64_t>> rows(k, std::vector<std::uint64_t>((n + 63) / 64, 0));
    auto mark_members = [&](std::vector<std::uint64_t>& row, std::uint32_t c) {
        for (auto s : sccs[c]) row[s / 64] |= std::uint64_t{1} << (s % 64);
    };
    for (auto c : order) {
        auto& row = rows[c];
        if (cyclic[c]) mark_members(row, c);
        for (auto d : succ[c]) {
            mark_members(row, d);
            for (std::size_t i = 0; i < row.size(); ++i) row[i] |= rows[d][i];
        }
    }

    Reachability closure(n);
    for (std::size_t s = 0; s < n; ++s) {
        auto dst = closure.row_words(s);
        std::copy(rows[comp[s]].begin(), rows[comp[s]].end(), dst.begin());
    }
    return closure;
}

std::vector<std::vector<std::uint32_t>> find_persistent_groups(const std::vector<std::vector<std::uint32_t>>& sccs,
                                                               const Reachability& c) {
    std::vector<std::vector<std::uint32_t>> groups;
    for (const auto& scc : sccs) {
        const auto head = scc.front();
        if (!c.reaches(head, head)) continue;
        std::size_t reached = 0;
        for (std::size_t j = 0; j < c.size(); ++j) reached += c.reaches(head, j) ? 1 : 0;
        // The component is always inside its own closure, so equal counts mean closed.
        if (reached == scc.size()) groups.push_back(scc);
    }
    return groups;
}

std::vector<TransientGroup> find_transient_groups(const std::vector<std::vector<std::uint32_t>>& persistent,
                                                  std::span<const std::uint32_t> transient_states,
                                                  const Reachability& c) {
    std::map<std::vector<int>, std::vector<std::uint32_t>> by_domicile;
    for (auto s : transient_states) {
        std::vector<int> domicile;
        for (std::size_t g = 0; g < persistent.size(); ++g) {
            if (c.reaches(s, persistent[g].front())) domicile.push_back(static_cast<int>(g + 1));
        }
        if (domicile.empty()) {
            throw InternalInconsistency("transient state " + std::to_string(s) + " reaches no persistent group");
        }
        by_domicile[std::move(domicile)].push_back(s);
    }
    std::vector<TransientGroup> groups;
    for (auto& [domicile, states] : by_domicile) {
        std::sort(states.begin(), states.end());
        groups.push_back({domicile, std::move(states)});
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const auto& a, const auto& b) { return a.domicile.size() < b.domicile.size(); });
    return groups;
}

std::string persistent_label(int group) { return "B_" + std::to_string(group); }

std::string transient_label(std::span<const int> domicile) {
    std::string out = "B(";
    for (std::size_t i = 0; i < domicile.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(domicile[i]);
    }
    return out + ")";
}

const FlowDecomposition::Group& FlowDecomposition::group_of(CellIndex z) const {
    for (const Group* g : all_groups()) {
        if (std::binary_search(g->cells.begin(), g->cells.end(), z)) return *g;
    }
    throw IndexOutOfRange("cell " + std::to_string(z.value) + " belongs to no group");
}

std::vector<const FlowDecomposition::Group*> FlowDecomposition::all_groups() const {
    std::vector<const Group*> out;
    for (const auto& g : persistent_groups) out.push_back(&g);
    for (const auto& g : transient_groups) out.push_back(&g);
    return out;
}

FlowDecomposition decompose(const TransitionMatrix& p) {
    const auto sccs = strongly_connected_components(p);
    const auto closure = reachability(p, sccs);
    const auto persistent = find_persistent_groups(sccs, closure);

    std::vector<char> is_persistent(p.size(), 0);
    for (const auto& g : persistent) {
        for (auto s : g) is_persistent[s] = 1;
    }
    std::vector<std::uint32_t> transient;
    for (std::uint32_t s = 0; s < p.size(); ++s) {
        if (!is_persistent[s]) transient.push_back(s);
    }
    const auto transient_groups = find_transient_groups(persistent, transient, closure);

    auto to_cells = [&](std::span<const std::uint32_t> states) {
        std::vector<CellIndex> cells;
        cells.reserve(states.size());
        for (auto s : states) cells.push_back(p.cell(s));
        return cells;
    };

    FlowDecomposition out;
    for (std::size_t g = 0; g < persistent.size(); ++g) {
        out.persistent_groups.push_back({persistent_label(static_cast<int>(g + 1)), {}, to_cells(persistent[g])});
    }
    for (const auto& tg : transient_groups) {
        out.transient_groups.push_back({transient_label(tg.domicile), tg.domicile, to_cells(tg.states)});
    }
    for (std::uint32_t s = 0; s < p.size(); ++s) {
        (is_persistent[s] ? out.persistent_cells : out.transient_cells).push_back(p.cell(s));
    }
    return out;
}

}  // namespace driftloc
