#pragma once

#include <random>

#include "driftloc/hmm.hpp"
#include "driftloc/sim.hpp"
#include "oracles.hpp"

namespace fixtures {

using namespace driftloc;

struct HmmInstance {
    Workspace workspace;
    HmmModel model;
    ObservationHistory obs;
};

// Random small field, r, rule, prior and an observation history sampled from
// the chain; with probability `corrupt` one symbol is overwritten at random.
inline HmmInstance random_hmm(std::mt19937_64& rng, int max_side, std::size_t max_steps, double corrupt = 0.2) {
    std::uniform_int_distribution<int> side(2, max_side);
    auto w = oracle::random_workspace(rng, side(rng), side(rng), 0.15);
    const auto f = oracle::random_field(rng, w);
    const auto cm = build_cell_map(w, f, default_time_step(w, f));
    const double r = std::bernoulli_distribution(0.5)(rng) ? 0.7 : 0.9;
    const auto rule = std::bernoulli_distribution(0.5)(rng) ? MappedSetRule::flow_cone : MappedSetRule::all_actions;
    const auto s = build_stochastic_map(w, cm, r, rule);
    const auto start = w.cell_of_state(std::uniform_int_distribution<std::size_t>(0, w.free_count() - 1)(rng));
    const auto mode = std::bernoulli_distribution(0.5)(rng) ? PriorMode::deterministic : PriorMode::probabilistic;
    auto pi = initial_distribution(w, start, mode);
    const auto steps = std::uniform_int_distribution<std::size_t>(1, max_steps)(rng);
    auto sample = sample_trajectory(w, s.mapping, pi, steps, rng());
    if (std::bernoulli_distribution(corrupt)(rng)) {
        sample.observations[std::uniform_int_distribution<std::size_t>(0, steps - 1)(rng)] =
            kAllDirections[std::uniform_int_distribution<std::size_t>(0, 8)(rng)];
    }
    HmmModel model(s.mapping, emission_matrix(s, w), std::move(pi));
    return {std::move(w), std::move(model), std::move(sample.observations)};
}

}  // namespace fixtures
