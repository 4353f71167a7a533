#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icid {

struct HiddenNode {
    std::string name;
    double r = 0.0;

    bool operator==(const HiddenNode&) const = default;
};

/// Edge between two observed nodes, carrying the influence probability p.
struct ObservedEdge {
    std::string from;
    std::string to;
    double p = 0.0;

    bool operator==(const ObservedEdge&) const = default;
};

/// Edge from a hidden node to an observed node, carrying q.
struct HiddenEdge {
    std::string from;
    std::string to;
    double q = 0.0;

    bool operator==(const HiddenEdge&) const = default;
};

/// Independent-cascade model with hidden confounders.
///
/// The order of `observed` is the topological order used by every
/// identification routine: bit i of an assignment is the state of
/// observed[i]. Hidden nodes have no parents and activate independently
/// with probability r.
struct CausalICModel {
    bool allow_cycles = false;
    std::vector<std::string> observed;
    std::vector<HiddenNode> hidden;
    std::vector<ObservedEdge> vv_edges;
    std::vector<HiddenEdge> uv_edges;

    bool operator==(const CausalICModel&) const = default;
};

enum class ModelClass { Markovian, SemiMarkovianChain, GlobalHidden, MixedGlobalMarkovian, General };

[[nodiscard]] std::string_view to_string(ModelClass cls);

struct Violation {
    std::string rule;
    std::string message;
    std::string element;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] bool has_rule(std::string_view rule) const;
};

[[nodiscard]] ValidationReport validate(const CausalICModel& model);
[[nodiscard]] ModelClass classify(const CausalICModel& model);
[[nodiscard]] std::vector<std::string> topological_order(const CausalICModel& model);

[[nodiscard]] CausalICModel parse_model(std::string_view text);
[[nodiscard]] std::string serialize_model(const CausalICModel& model);
[[nodiscard]] CausalICModel load_model(const std::filesystem::path& path);

struct WeightedLink {
    int node = 0;
    double weight = 0.0;
};

/// Integer-indexed view of a validated model, shared by the engines.
struct IndexedModel {
    int num_observed = 0;
    int num_hidden = 0;
    std::vector<double> r;
    std::vector<std::vector<WeightedLink>> observed_in;   // parents (observed index, p)
    std::vector<std::vector<WeightedLink>> hidden_in;     // parents (hidden index, q)
    std::vector<std::vector<WeightedLink>> observed_out;  // children (observed index, p)
    std::vector<std::vector<WeightedLink>> hidden_out;    // children (observed index, q)
};

/// Throws ErrorKind::InvalidModel when validate() reports violations.
[[nodiscard]] IndexedModel index_model(const CausalICModel& model);

[[nodiscard]] int observed_index(const CausalICModel& model, std::string_view name);
[[nodiscard]] int hidden_index(const CausalICModel& model, std::string_view name);

/// Position i of the chain is confounded by hidden node `hidden_at[i]`,
/// which points to observed[i] and observed[i + 1].
struct ChainLayout {
    std::vector<int> hidden_at;
};

/// One hidden node with an edge to every observed node, plus (mixed models)
/// one private hidden parent per observed node.
struct GlobalLayout {
    int global_hidden = -1;
    std::vector<int> private_hidden;  // empty for the pure global class
};

[[nodiscard]] bool is_markovian(const CausalICModel& model);
[[nodiscard]] std::optional<ChainLayout> chain_layout(const CausalICModel& model);
[[nodiscard]] std::optional<GlobalLayout> global_layout(const CausalICModel& model);
[[nodiscard]] std::optional<GlobalLayout> mixed_layout(const CausalICModel& model);

/// Observed-node reachability over vv edges: reach[a][b] is true iff there is
/// a directed path of length >= 1 from a to b.
[[nodiscard]] std::vector<std::vector<bool>> observed_reachability(const CausalICModel& model);

[[nodiscard]] std::string edge_label(std::string_view from, std::string_view to);

}  // namespace icid
