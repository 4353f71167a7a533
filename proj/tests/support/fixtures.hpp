#pragma once

#include <string>

#include "icid/model.hpp"

namespace fixture {

inline const char* const kWitnessJson = R"({ "allow_cycles": false,
  "observed": ["V1","V2","V3"],
  "hidden":   [ {"name":"U1","r":0.5}, {"name":"U2","r":0.5} ],
  "vv_edges": [ {"from":"V1","to":"V2","p":0.5}, {"from":"V2","to":"V3","p":0.5} ],
  "uv_edges": [ {"from":"U1","to":"V1","q":0.5}, {"from":"U1","to":"V2","q":0.5},
                {"from":"U2","to":"V2","q":0.5}, {"from":"U2","to":"V3","q":0.5} ] })";

inline icid::CausalICModel witness_graph() { return icid::parse_model(kWitnessJson); }

/// V1 -> V2 with private hidden parents U1, U2 (r = 1).
inline icid::CausalICModel two_node_markovian(double q1, double q2, double p) {
    icid::CausalICModel m;
    m.observed = {"V1", "V2"};
    m.hidden = {{"U1", 1.0}, {"U2", 1.0}};
    m.vv_edges = {{"V1", "V2", p}};
    m.uv_edges = {{"U1", "V1", q1}, {"U2", "V2", q2}};
    return m;
}

/// Global hidden node U0 over the given observed edges.
inline icid::CausalICModel global_model(int n, double r, const std::vector<double>& q,
                                        const std::vector<icid::ObservedEdge>& edges) {
    icid::CausalICModel m;
    for (int i = 1; i <= n; ++i) m.observed.push_back("V" + std::to_string(i));
    m.hidden = {{"U0", r}};
    m.vv_edges = edges;
    for (int i = 0; i < n; ++i) m.uv_edges.push_back({"U0", m.observed[i], q[i]});
    return m;
}

/// Global U0 plus a private Ui per node.
inline icid::CausalICModel mixed_model(int n, double r0, const std::vector<double>& q0, const std::vector<double>& q,
                                       const std::vector<icid::ObservedEdge>& edges) {
    icid::CausalICModel m = global_model(n, r0, q0, edges);
    for (int i = 0; i < n; ++i) {
        const std::string u = "U" + std::to_string(i + 1);
        m.hidden.push_back({u, 1.0});
        m.uv_edges.push_back({u, m.observed[i], q[i]});
    }
    return m;
}

}  // namespace fixture
