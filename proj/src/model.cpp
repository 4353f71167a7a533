#include "icid/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "icid/error.hpp"

namespace icid {

namespace {

using ordered_json = nlohmann::ordered_json;

[[nodiscard]] bool in_unit_interval(double v) {
    return !std::isnan(v) && v >= 0.0 && v <= 1.0;
}

struct NameTable {
    std::unordered_map<std::string, int> observed;
    std::unordered_map<std::string, int> hidden;
};

NameTable build_names(const CausalICModel& model) {
    NameTable t;
    for (int i = 0; i < static_cast<int>(model.observed.size()); ++i) {
        t.observed.emplace(model.observed[i], i);
    }
    for (int i = 0; i < static_cast<int>(model.hidden.size()); ++i) {
        t.hidden.emplace(model.hidden[i].name, i);
    }
    return t;
}

// Kahn's algorithm over resolvable vv edges; true if a cycle exists.
bool has_cycle(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> out(n);
    for (auto [a, b] : edges) {
        out[a].push_back(b);
        ++indegree[b];
    }
    std::vector<int> ready;
    for (int i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    int visited = 0;
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        ++visited;
        for (int w : out[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    return visited != n;
}

[[noreturn]] void parse_fail(const std::string& what) {
    throw Error(ErrorKind::Parse, what);
}

double read_probability(const ordered_json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(where + ": missing key '" + key + "'");
    if (!it->is_number()) parse_fail(where + ": '" + key + "' must be a number");
    return it->get<double>();
}

std::string read_string(const ordered_json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(where + ": missing key '" + key + "'");
    if (!it->is_string()) parse_fail(where + ": '" + key + "' must be a string");
    return it->get<std::string>();
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            parse_fail(where + ": unknown key '" + key + "'");
        }
    }
}

const ordered_json& array_field(const ordered_json& root, const char* key, bool required) {
    static const ordered_json empty = ordered_json::array();
    auto it = root.find(key);
    if (it == root.end()) {
        if (required) parse_fail(std::string("missing key '") + key + "'");
        return empty;
    }
    if (!it->is_array()) parse_fail(std::string("'") + key + "' must be an array");
    return *it;
}

}  // namespace

std::string_view to_string(ModelClass cls) {
    switch (cls) {
        case ModelClass::Markovian: return "Markovian";
        case ModelClass::SemiMarkovianChain: return "SemiMarkovianChain";
        case ModelClass::GlobalHidden: return "GlobalHidden";
        case ModelClass::MixedGlobalMarkovian: return "MixedGlobalMarkovian";
        case ModelClass::General: return "General";
    }
    return "General";
}

std::string edge_label(std::string_view from, std::string_view to) {
    std::string s(from);
    s += "->";
    s += to;
    return s;
}

bool ValidationReport::has_rule(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
}

ValidationReport validate(const CausalICModel& model) {
    ValidationReport report;
    auto add = [&](std::string rule, std::string message, std::string element) {
        report.violations.push_back({std::move(rule), std::move(message), std::move(element)});
    };

    std::set<std::string> seen;
    for (const auto& name : model.observed) {
        if (name.empty()) add("empty_name", "node name is empty", name);
        if (!seen.insert(name).second) add("duplicate_name", "duplicate node name", name);
    }
    for (const auto& h : model.hidden) {
        if (h.name.empty()) add("empty_name", "node name is empty", h.name);
        if (!seen.insert(h.name).second) add("duplicate_name", "duplicate node name", h.name);
        if (!in_unit_interval(h.r)) add("probability_out_of_range", "probability out of range", h.name);
    }

    const NameTable names = build_names(model);
    std::vector<std::pair<int, int>> resolved;
    std::set<std::pair<std::string, std::string>> edge_keys;

    for (const auto& e : model.vv_edges) {
        const std::string label = edge_label(e.from, e.to);
        if (!in_unit_interval(e.p)) add("probability_out_of_range", "probability out of range", label);
        if (!edge_keys.insert({e.from, e.to}).second) add("duplicate_edge", "duplicate edge", label);
        const bool from_obs = names.observed.contains(e.from);
        const bool to_obs = names.observed.contains(e.to);
        if (names.hidden.contains(e.to)) {
            add("hidden_has_parent", "hidden node has parent", label);
        } else if (!to_obs) {
            add("unknown_node", "edge endpoint names an unknown node", label);
        }
        if (names.hidden.contains(e.from)) {
            add("edge_kind", "observed edge starts at a hidden node (use uv_edges)", label);
        } else if (!from_obs) {
            add("unknown_node", "edge endpoint names an unknown node", label);
        }
        if (from_obs && to_obs) {
            if (e.from == e.to) {
                add("self_loop", "self loop", label);
            } else {
                resolved.emplace_back(names.observed.at(e.from), names.observed.at(e.to));
            }
        }
    }

    for (const auto& e : model.uv_edges) {
        const std::string label = edge_label(e.from, e.to);
        if (!in_unit_interval(e.q)) add("probability_out_of_range", "probability out of range", label);
        if (!edge_keys.insert({e.from, e.to}).second) add("duplicate_edge", "duplicate edge", label);
        if (names.hidden.contains(e.to)) {
            add("hidden_has_parent", "hidden node has parent", label);
        } else if (!names.observed.contains(e.to)) {
            add("unknown_node", "edge endpoint names an unknown node", label);
        }
        if (names.observed.contains(e.from)) {
            add("edge_kind", "hidden edge starts at an observed node (use vv_edges)", label);
        } else if (!names.hidden.contains(e.from)) {
            add("unknown_node", "edge endpoint names an unknown node", label);
        }
    }

    if (!model.allow_cycles) {
        if (has_cycle(static_cast<int>(model.observed.size()), resolved)) {
            add("cycle_detected", "cycle detected", "vv_edges");
        } else {
            for (auto [a, b] : resolved) {
                if (a > b) {
                    add("order_violation", "edge points backwards in the observed order",
                        edge_label(model.observed[a], model.observed[b]));
                }
            }
        }
    }
    return report;
}

IndexedModel index_model(const CausalICModel& model) {
    const auto report = validate(model);
    if (!report.ok()) {
        const auto& v = report.violations.front();
        throw Error(ErrorKind::InvalidModel, v.message + ": " + v.element);
    }
    const NameTable names = build_names(model);
    IndexedModel im;
    im.num_observed = static_cast<int>(model.observed.size());
    im.num_hidden = static_cast<int>(model.hidden.size());
    for (const auto& h : model.hidden) im.r.push_back(h.r);
    im.observed_in.resize(im.num_observed);
    im.hidden_in.resize(im.num_observed);
    im.observed_out.resize(im.num_observed);
    im.hidden_out.resize(im.num_hidden);
    for (const auto& e : model.vv_edges) {
        int a = names.observed.at(e.from);
        int b = names.observed.at(e.to);
        im.observed_in[b].push_back({a, e.p});
        im.observed_out[a].push_back({b, e.p});
    }
    for (const auto& e : model.uv_edges) {
        int u = names.hidden.at(e.from);
        int b = names.observed.at(e.to);
        im.hidden_in[b].push_back({u, e.q});
        im.hidden_out[u].push_back({b, e.q});
    }
    return im;
}

int observed_index(const CausalICModel& model, std::string_view name) {
    auto it = std::find(model.observed.begin(), model.observed.end(), name);
    if (it == model.observed.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown observed node: " + std::string(name));
    }
    return static_cast<int>(it - model.observed.begin());
}

int hidden_index(const CausalICModel& model, std::string_view name) {
    for (int i = 0; i < static_cast<int>(model.hidden.size()); ++i) {
        if (model.hidden[i].name == name) return i;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown hidden node: " + std::string(name));
}

std::vector<std::string> topological_order(const CausalICModel& model) {
    const auto report = validate(model);
    if (report.has_rule("order_violation") || report.has_rule("cycle_detected")) {
        throw Error(ErrorKind::InvalidModel, "stored observed order is not a topological order");
    }
    return model.observed;
}

bool is_markovian(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    for (int v = 0; v < im.num_observed; ++v) {
        if (im.hidden_in[v].size() > 1) return false;
    }
    for (int u = 0; u < im.num_hidden; ++u) {
        if (im.hidden_out[u].size() != 1) return false;
    }
    return true;
}

std::optional<ChainLayout> chain_layout(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    const int n = im.num_observed;
    if (n < 2 || im.num_hidden != n - 1) return std::nullopt;
    if (static_cast<int>(model.vv_edges.size()) != n - 1) return std::nullopt;
    for (int v = 1; v < n; ++v) {
        if (im.observed_in[v].size() != 1 || im.observed_in[v][0].node != v - 1) return std::nullopt;
    }
    ChainLayout layout;
    layout.hidden_at.assign(n - 1, -1);
    for (int u = 0; u < im.num_hidden; ++u) {
        const auto& out = im.hidden_out[u];
        if (out.size() != 2) return std::nullopt;
        int lo = std::min(out[0].node, out[1].node);
        int hi = std::max(out[0].node, out[1].node);
        if (hi != lo + 1 || layout.hidden_at[lo] != -1) return std::nullopt;
        layout.hidden_at[lo] = u;
    }
    return layout;
}

std::optional<GlobalLayout> global_layout(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    if (im.num_hidden != 1 || im.num_observed < 1) return std::nullopt;
    if (static_cast<int>(im.hidden_out[0].size()) != im.num_observed) return std::nullopt;
    return GlobalLayout{0, {}};
}

std::optional<GlobalLayout> mixed_layout(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    const int n = im.num_observed;
    if (n < 1 || im.num_hidden != n + 1) return std::nullopt;
    int global = -1;
    for (int u = 0; u < im.num_hidden; ++u) {
        if (static_cast<int>(im.hidden_out[u].size()) == n && n > 1) {
            if (global != -1) return std::nullopt;
            global = u;
        }
    }
    if (n == 1) global = 0;
    if (global == -1) return std::nullopt;
    GlobalLayout layout{global, std::vector<int>(n, -1)};
    for (int u = 0; u < im.num_hidden; ++u) {
        if (u == global) continue;
        if (im.hidden_out[u].size() != 1) return std::nullopt;
        int v = im.hidden_out[u][0].node;
        if (layout.private_hidden[v] != -1) return std::nullopt;
        layout.private_hidden[v] = u;
    }
    return layout;
}

ModelClass classify(const CausalICModel& model) {
    const auto report = validate(model);
    if (!report.ok() || model.allow_cycles) return ModelClass::General;
    if (is_markovian(model)) return ModelClass::Markovian;
    if (chain_layout(model)) return ModelClass::SemiMarkovianChain;
    if (global_layout(model)) return ModelClass::GlobalHidden;
    if (mixed_layout(model)) return ModelClass::MixedGlobalMarkovian;
    return ModelClass::General;
}

std::vector<std::vector<bool>> observed_reachability(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    const int n = im.num_observed;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
        std::vector<int> stack;
        for (const auto& c : im.observed_out[s]) stack.push_back(c.node);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (reach[s][v]) continue;
            reach[s][v] = true;
            for (const auto& c : im.observed_out[v]) stack.push_back(c.node);
        }
    }
    return reach;
}

CausalICModel parse_model(std::string_view text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail("syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object()) parse_fail("model document must be a JSON object");
    reject_unknown_keys(root, {"allow_cycles", "observed", "hidden", "vv_edges", "uv_edges"}, "model");

    CausalICModel model;
    if (auto it = root.find("allow_cycles"); it != root.end()) {
        if (!it->is_boolean()) parse_fail("'allow_cycles' must be a boolean");
        model.allow_cycles = it->get<bool>();
    }
    for (const auto& name : array_field(root, "observed", true)) {
        if (!name.is_string()) parse_fail("'observed' entries must be strings");
        model.observed.push_back(name.get<std::string>());
    }
    const auto& hidden = array_field(root, "hidden", false);
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        const std::string where = "hidden[" + std::to_string(i) + "]";
        if (!hidden[i].is_object()) parse_fail(where + ": must be an object");
        reject_unknown_keys(hidden[i], {"name", "r"}, where);
        model.hidden.push_back({read_string(hidden[i], "name", where), read_probability(hidden[i], "r", where)});
    }
    const auto& vv = array_field(root, "vv_edges", false);
    for (std::size_t i = 0; i < vv.size(); ++i) {
        const std::string where = "vv_edges[" + std::to_string(i) + "]";
        if (!vv[i].is_object()) parse_fail(where + ": must be an object");
        reject_unknown_keys(vv[i], {"from", "to", "p"}, where);
        model.vv_edges.push_back({read_string(vv[i], "from", where), read_string(vv[i], "to", where),
                                  read_probability(vv[i], "p", where)});
    }
    const auto& uv = array_field(root, "uv_edges", false);
    for (std::size_t i = 0; i < uv.size(); ++i) {
        const std::string where = "uv_edges[" + std::to_string(i) + "]";
        if (!uv[i].is_object()) parse_fail(where + ": must be an object");
        reject_unknown_keys(uv[i], {"from", "to", "q"}, where);
        model.uv_edges.push_back({read_string(uv[i], "from", where), read_string(uv[i], "to", where),
                                  read_probability(uv[i], "q", where)});
    }

    const auto report = validate(model);
    if (!report.ok()) {
        std::string message;
        for (const auto& v : report.violations) {
            if (!message.empty()) message += "; ";
            message += v.message + " (" + v.element + ")";
        }
        throw Error(ErrorKind::InvalidModel, message);
    }
    return model;
}

std::string serialize_model(const CausalICModel& model) {
    ordered_json root;
    root["allow_cycles"] = model.allow_cycles;
    root["observed"] = model.observed;
    root["hidden"] = ordered_json::array();
    for (const auto& h : model.hidden) root["hidden"].push_back({{"name", h.name}, {"r", h.r}});
    root["vv_edges"] = ordered_json::array();
    for (const auto& e : model.vv_edges) {
        root["vv_edges"].push_back({{"from", e.from}, {"to", e.to}, {"p", e.p}});
    }
    root["uv_edges"] = ordered_json::array();
    for (const auto& e : model.uv_edges) {
        root["uv_edges"].push_back({{"from", e.from}, {"to", e.to}, {"q", e.q}});
    }
    return root.dump(2) + "\n";
}

CausalICModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open model file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

}  // namespace icid
