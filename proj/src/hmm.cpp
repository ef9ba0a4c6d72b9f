#include "driftloc/hmm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "driftloc/errors.hpp"

namespace driftloc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Scores within this band of the maximum count as ties.
double tie_band(double best) { return 1e-12 * (1.0 + std::abs(best)); }

}  // namespace

ObservationHistory parse_observations(std::string_view text) {
    ObservationHistory out;
    std::size_t pos = 0;
    std::size_t token = 0;
    auto is_sep = [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == ','; };
    while (pos < text.size()) {
        while (pos < text.size() && is_sep(text[pos])) ++pos;
        if (pos >= text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && !is_sep(text[end])) ++end;
        ++token;
        const auto sym = text.substr(pos, end - pos);
        const auto d = parse_direction(sym);
        if (!d) throw ParseError(1, "unknown compass symbol '" + std::string(sym) + "' at position " + std::to_string(token));
        out.push_back(*d);
        pos = end;
    }
    return out;
}

std::string format_observations(std::span<const Direction> obs) {
    std::string out;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (i) out += ' ';
        out += symbol_of(obs[i]);
    }
    return out;
}

EmissionMatrix emission_matrix(const StochasticCellMap& s, const Workspace& w) {
    const auto& p = s.mapping;
    std::vector<EmissionMatrix::Row> rows(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        rows[i].fill(0.0);
        for (const Transition& t : p.row(i)) {
            rows[i][index_of(direction_between(w, p.cell(i), p.cell(t.to)))] += t.p;
        }
    }
    return EmissionMatrix(std::move(rows));
}

std::string_view to_string(PriorMode mode) {
    return mode == PriorMode::deterministic ? "det" : "prob";
}

PriorMode parse_prior_mode(std::string_view name) {
    if (name == "det" || name == "deterministic") return PriorMode::deterministic;
    if (name == "prob" || name == "probabilistic") return PriorMode::probabilistic;
    throw ParameterError("unknown prior mode '" + std::string(name) + "' (expected det or prob)");
}

std::vector<double> initial_distribution(const Workspace& w, CellIndex x_init, PriorMode mode) {
    std::vector<double> pi(w.free_count(), 0.0);
    const std::size_t start = w.state_of(x_init);
    if (mode == PriorMode::deterministic) {
        pi[start] = 1.0;
        return pi;
    }
    const auto around = neighbors(w, x_init);
    const double mass = 1.0 / static_cast<double>(around.size() + 1);
    pi[start] = mass;
    for (CellIndex c : around) pi[w.state_of(c)] = mass;
    return pi;
}

HmmModel::HmmModel(TransitionMatrix p, EmissionMatrix q, std::vector<double> pi)
    : transitions(std::move(p)), emissions(std::move(q)), prior(std::move(pi)) {
    if (emissions.size() != transitions.size() || prior.size() != transitions.size()) {
        throw DimensionError("HMM components disagree on the number of states");
    }
    double total = 0.0;
    for (double v : prior) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("initial distribution has an invalid entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ParameterError("initial distribution does not sum to 1");
}

namespace {

std::size_t first_infeasible_step(const HmmModel& model, std::span<const Direction> obs) {
    const auto& p = model.transitions;
    std::vector<char> alive(p.size(), 0), next(p.size(), 0);
    for (std::size_t s = 0; s < p.size(); ++s) alive[s] = model.prior[s] > 0.0;
    for (std::size_t t = 1; t <= obs.size(); ++t) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!alive[i] || model.emissions.at(i, obs[t - 1]) <= 0.0) continue;
            for (const Transition& tr : p.row(i)) {
                if (tr.p > 0.0) next[tr.to] = 1, any = true;
            }
        }
        if (!any) return t;
        alive.swap(next);
    }
    return obs.size();
}

DecodedPath decode(const HmmModel& model, std::span<const Direction> obs, bool parallel) {
    const auto& p = model.transitions;
    const std::size_t n = p.size();
    const std::size_t steps = obs.size();
    if (steps == 0) throw ParameterError("observation history must hold at least one symbol");

    std::vector<double> log_p(p.nonzeros());
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (const Transition& t : p.row(i)) log_p[k++] = safe_log(t.p);
        }
    }
    std::vector<std::size_t> row_offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) row_offset[i + 1] = row_offset[i] + p.row(i).size();

    // best_suffix[t][i]: best log score of observations t+1..T starting in state i at time t.
    std::vector<std::vector<double>> best_suffix(steps + 1, std::vector<double>(n, 0.0));
    for (std::size_t t = steps; t-- > 0;) {
        const std::size_t y = index_of(obs[t]);
        const auto& later = best_suffix[t + 1];
        auto& here = best_suffix[t];
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t si = 0; si < count; ++si) {
            const auto i = static_cast<std::size_t>(si);
            const double emit = safe_log(model.emissions.row(i)[y]);
            double best = kNegInf;
            if (emit != kNegInf) {
                const auto row = p.row(i);
                for (std::size_t e = 0; e < row.size(); ++e) {
                    best = std::max(best, log_p[row_offset[i] + e] + later[row[e].to]);
                }
            }
            here[i] = best == kNegInf ? kNegInf : emit + best;
        }
    }

    double best_start = kNegInf;
    for (std::size_t i = 0; i < n; ++i) best_start = std::max(best_start, safe_log(model.prior[i]) + best_suffix[0][i]);
    if (best_start == kNegInf) throw ZeroProbabilityError(first_infeasible_step(model, obs));

    // Forward traceback: smallest state within the tie band at each step.
    std::vector<std::size_t> states;
    states.reserve(steps + 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (safe_log(model.prior[i]) + best_suffix[0][i] >= best_start - tie_band(best_start)) {
            states.push_back(i);
            break;
        }
    }
    for (std::size_t t = 1; t <= steps; ++t) {
        const std::size_t i = states.back();
        const auto row = p.row(i);
        double best = kNegInf;
        for (std::size_t e = 0; e < row.size(); ++e) best = std::max(best, log_p[row_offset[i] + e] + best_suffix[t][row[e].to]);
        for (std::size_t e = 0; e < row.size(); ++e) {
            if (log_p[row_offset[i] + e] + best_suffix[t][row[e].to] >= best - tie_band(best)) {
                states.push_back(row[e].to);
                break;
            }
        }
    }

    DecodedPath out;
    out.path.reserve(states.size());
    for (auto s : states) out.path.push_back(p.cell(s));
    out.log_prob = path_log_probability(model, out.path, obs);
    return out;
}

}  // namespace

DecodedPath viterbi(const HmmModel& model, std::span<const Direction> obs) { return decode(model, obs, true); }

DecodedPath viterbi_serial(const HmmModel& model, std::span<const Direction> obs) { return decode(model, obs, false); }

CellIndex viterbi_final_state(const HmmModel& model, std::span<const Direction> obs) {
    return viterbi(model, obs).path.back();
}

double path_log_probability(const HmmModel& model, std::span<const CellIndex> path, std::span<const Direction> obs) {
    if (path.size() != obs.size() + 1) {
        throw DimensionError("trajectory of " + std::to_string(path.size()) + " cells does not match " +
                             std::to_string(obs.size()) + " observations");
    }
    const auto& p = model.transitions;
    std::unordered_map<std::int32_t, std::size_t> state;
    for (std::size_t s = 0; s < p.size(); ++s) state.emplace(p.cell(s).value, s);
    auto state_of = [&](CellIndex z) {
        const auto it = state.find(z.value);
        if (it == state.end()) throw IndexOutOfRange("cell " + std::to_string(z.value) + " is not a state");
        return it->second;
    };

    std::size_t prev = state_of(path[0]);
    double total = safe_log(model.prior[prev]);
    for (std::size_t t = 1; t < path.size(); ++t) {
        const std::size_t cur = state_of(path[t]);
        total += safe_log(model.emissions.at(prev, obs[t - 1])) + safe_log(p.at(prev, cur));
        prev = cur;
    }
    return total;
}

}  // namespace driftloc
