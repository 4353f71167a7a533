#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "icid/distribution.hpp"
#include "icid/model.hpp"

namespace icid {

/// Upper bound on the number of binary outcomes an enumeration may range
/// over. exact_joint counts |U|+|V|, live_edge_exact counts |U|+|E|.
struct SizeGuard {
    int max_units = 24;
};

/// P(node = 1 | its parents). `states` maps node names (observed or hidden)
/// to 0/1 and must cover every parent of `node`; extra entries are ignored.
[[nodiscard]] double activation_probability(const CausalICModel& model, const std::string& node,
                                            const std::map<std::string, int>& states);

/// Exact joint over observed nodes by enumerating hidden states. Requires
/// every vv edge to point forward in the observed order.
[[nodiscard]] ObservedDistribution exact_joint(const CausalICModel& model, SizeGuard guard = {});

/// Exact joint by enumerating hidden activations and edge liveness; seeds
/// are observed nodes that start active. Cycles are allowed.
[[nodiscard]] ObservedDistribution live_edge_exact(const CausalICModel& model,
                                                   const std::vector<std::string>& seeds = {},
                                                   SizeGuard guard = {});

/// Observed active sets per round: rounds[0] holds the seeds plus the nodes
/// switched on by active hidden nodes, and each later entry adds the nodes
/// activated in that round. Masks use bit i for observed[i].
struct Cascade {
    std::uint64_t hidden_active = 0;
    std::vector<std::uint64_t> rounds;
    std::uint64_t final_state = 0;
};

/// Round-based simulation driven by CounterRng(rng_seed). Draw order: one
/// draw per hidden node in index order, then for each newly active node
/// (hidden nodes before observed, each in index order) one draw per out-edge
/// whose target is still inactive, in edge-list order.
[[nodiscard]] Cascade sample_cascade(const CausalICModel& model, const std::vector<std::string>& seeds,
                                     std::uint64_t rng_seed);

/// Frequency table of `num_samples` cascades without seeds. Sample k uses
/// the stream CounterRng::stream_seed(rng_seed, k).
[[nodiscard]] ObservedDistribution empirical_distribution(const CausalICModel& model, std::uint64_t num_samples,
                                                          std::uint64_t rng_seed);

}  // namespace icid
