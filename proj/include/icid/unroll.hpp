#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "icid/distribution.hpp"
#include "icid/model.hpp"

namespace icid {

/// Node states in the unrolled network.
enum UnrolledState : int { kIdle = 0, kFresh = 1, kSpent = 2 };

/// Time-layered network with one three-state node per observed node and
/// layer 0..horizon. Layer t depends on layer t-1 through the node itself
/// and its observed parents; hidden nodes are binary layer-0 nodes that feed
/// layer 1 only.
struct UnrolledBN {
    CausalICModel source;
    IndexedModel index;
    int horizon = 0;
};

/// Horizon defaults to the number of observed nodes.
[[nodiscard]] UnrolledBN unroll(const CausalICModel& model, std::optional<int> horizon = std::nullopt);

/// Distribution of node `node` at `layer` (>= 1) given its own state and its
/// observed parents' states at layer-1 (parents in index_model order) and,
/// for layer 1, the states of its hidden parents.
[[nodiscard]] std::array<double, 3> unrolled_conditional(const UnrolledBN& bn, int node, int layer, int self_prev,
                                                         const std::vector<int>& parent_prev,
                                                         const std::vector<int>& hidden_parents = {});

/// Exact forward evaluation. Seeds start fresh at layer 0; a node counts as
/// active when its final-layer state is fresh or spent. Refuses more than
/// `max_observed` observed or 20 hidden nodes.
[[nodiscard]] ObservedDistribution unrolled_final_distribution(const UnrolledBN& bn,
                                                               const std::vector<std::string>& seeds = {},
                                                               int max_observed = 12);

/// Largest atom gap between the unrolled evaluation and live-edge enumeration.
[[nodiscard]] double check_unroll_equivalence(const CausalICModel& model, const std::vector<std::string>& seeds = {},
                                              std::optional<int> horizon = std::nullopt);

/// Nodes, edges and conditional tables as a JSON document. Refuses networks
/// whose tables would exceed `max_rows` rows in total.
[[nodiscard]] std::string unrolled_to_json(const UnrolledBN& bn, std::size_t max_rows = 1'000'000);

}  // namespace icid
