#include "icid/serialization.hpp"

#include <json.hpp>

#include "icid/error.hpp"

namespace icid {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json estimate(const Estimate& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json per_node(const std::vector<std::string>& nodes, const std::vector<Estimate>& values) {
    ordered_json out = ordered_json::object();
    for (std::size_t i = 0; i < nodes.size(); ++i) out[nodes[i]] = estimate(values[i]);
    return out;
}

ordered_json per_edge(const std::vector<EdgeEstimate>& edges) {
    ordered_json out = ordered_json::object();
    for (const auto& e : edges) out[edge_label(e.from, e.to)] = estimate(e.value);
    return out;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

ordered_json witness_params(const WitnessParams& w) {
    return {{"p12", w.p12}, {"p23", w.p23}, {"r1", w.r1}, {"r2", w.r2},
            {"q11", w.q11}, {"q12", w.q12}, {"q21", w.q21}, {"q22", w.q22}};
}

}  // namespace

std::string result_json(const MarkovianParams& params) {
    ordered_json doc;
    doc["class"] = "markovian";
    doc["q"] = per_node(params.nodes, params.q);
    doc["p"] = per_edge(params.p);
    doc["unidentifiable"] = params.unidentifiable;
    doc["warnings"] = params.warnings;
    return dump(doc);
}

std::string result_json(const ChainResult& result) {
    const ChainParams& c = result.params;
    ordered_json doc;
    doc["class"] = "chain";
    doc["n"] = c.n;
    doc["p"] = c.p;
    doc["r"] = c.r;
    doc["q1"] = c.q1;
    doc["q2"] = c.q2;
    doc["resimulation_gap"] = result.resimulation_gap ? ordered_json(*result.resimulation_gap) : ordered_json(nullptr);
    doc["warnings"] = result.warnings;
    return dump(doc);
}

std::string result_json(const GlobalParams& params) {
    ordered_json doc;
    doc["class"] = "global";
    doc["case"] = params.algorithm_case;
    doc["r"] = estimate(params.r);
    doc["q"] = per_node(params.nodes, params.q);
    doc["p"] = per_edge(params.p);
    doc["unidentifiable"] = params.unidentifiable;
    doc["resimulation_gap"] = params.resimulation_gap ? ordered_json(*params.resimulation_gap) : ordered_json(nullptr);
    doc["warnings"] = params.warnings;
    return dump(doc);
}

std::string result_json(const MixedResult& result) {
    const MixedParams& m = result.params;
    ordered_json doc;
    doc["class"] = "mixed";
    doc["triple"] = {m.nodes[result.triple.i], m.nodes[result.triple.j], m.nodes[result.triple.k]};
    doc["adjacent"] = result.triple.adjacent;
    doc["r0"] = estimate(m.r0);
    doc["q0"] = per_node(m.nodes, m.q0);
    doc["q"] = per_node(m.nodes, m.q);
    doc["p"] = per_edge(m.p);
    doc["unresolved"] = m.unresolved;
    doc["resimulation_gap"] = m.resimulation_gap ? ordered_json(*m.resimulation_gap) : ordered_json(nullptr);
    doc["warnings"] = m.warnings;
    return dump(doc);
}

std::string witness_json(const WitnessPair& pair, const WitnessCheck* check) {
    ordered_json doc;
    doc["r2"] = pair.r2;
    doc["base"] = witness_params(pair.base);
    doc["alt"] = witness_params(pair.alt);
    if (check) {
        doc["agrees"] = check->agrees;
        doc["max_distribution_gap"] = check->max_gap;
        doc["parameter_gap"] = check->param_gap;
        doc["settings_compared"] = check->settings;
    }
    return dump(doc);
}

PriorKnowledge parse_prior(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string("prior file: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("p1") || !doc["p1"].is_number()) {
        throw Error(ErrorKind::Parse, "prior file needs a numeric \"p1\"");
    }
    const bool has_q2 = doc.contains("q2");
    const bool has_r = doc.contains("r");
    if (has_q2 == has_r) throw Error(ErrorKind::Parse, "prior file needs exactly one of \"q2\" and \"r\"");
    for (const auto& [key, value] : doc.items()) {
        if (key != "p1" && key != "q2" && key != "r") throw Error(ErrorKind::Parse, "unknown prior field: " + key);
    }
    const ordered_json& seq = has_q2 ? doc["q2"] : doc["r"];
    if (!seq.is_array()) throw Error(ErrorKind::Parse, "prior sequence must be an array");
    PriorKnowledge prior;
    prior.p1 = doc["p1"].get<double>();
    prior.kind = has_q2 ? PriorKnowledge::Kind::Q2 : PriorKnowledge::Kind::R;
    for (const auto& v : seq) {
        if (!v.is_number()) throw Error(ErrorKind::Parse, "prior sequence must hold numbers");
        prior.values.push_back(v.get<double>());
    }
    return prior;
}

std::string serialize_prior(const PriorKnowledge& prior) {
    ordered_json doc;
    doc["p1"] = prior.p1;
    doc[prior.kind == PriorKnowledge::Kind::Q2 ? "q2" : "r"] = prior.values;
    return dump(doc);
}

std::string error_json(std::string_view kind, std::string_view message) {
    return ordered_json{{"error", kind}, {"message", message}}.dump();
}

}  // namespace icid
