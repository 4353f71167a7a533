#pragma once

#include "icid/chain.hpp"
#include "icid/model.hpp"
#include "icid/rng.hpp"

namespace icid {

struct ParamRange {
    double lo = 0.1;
    double hi = 0.9;
};

/// Every node gets a private hidden parent; node t draws up to
/// `max_in_degree` distinct parents among earlier nodes.
[[nodiscard]] CausalICModel random_markovian(CounterRng& rng, int n, int max_in_degree, ParamRange range);

[[nodiscard]] ChainParams random_chain(CounterRng& rng, int n, ParamRange range);

/// Global hidden node over a random DAG (each forward pair linked with
/// probability `edge_prob`). Each q is zeroed with probability `zero_q_prob`
/// while at least three stay nonzero.
[[nodiscard]] CausalICModel random_global(CounterRng& rng, int n, double edge_prob, double zero_q_prob,
                                          ParamRange range);

/// Global plus private hidden nodes over a random DAG that has a
/// disconnected triple placeable consecutively in a topological order.
[[nodiscard]] CausalICModel random_mixed_adjacent(CounterRng& rng, int n, double edge_prob, ParamRange range);

/// Mixed model (n >= 4) whose only disconnected triple is split by a path
/// through another node.
[[nodiscard]] CausalICModel random_mixed_spread(CounterRng& rng, int n, ParamRange range);

/// DAG with `num_hidden` hidden nodes each pointing at a random nonempty set
/// of observed nodes, and at most `max_vv_edges` observed edges.
[[nodiscard]] CausalICModel random_dag(CounterRng& rng, int n, int num_hidden, int max_vv_edges, int max_uv_edges,
                                       ParamRange range);

/// Directed graph with cycles allowed (no self loops).
[[nodiscard]] CausalICModel random_cyclic(CounterRng& rng, int n, int num_edges, int num_hidden, ParamRange range);

}  // namespace icid
