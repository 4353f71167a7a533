#include "icid/unroll.hpp"

#include <cmath>
#include <json.hpp>

#include "icid/error.hpp"
#include "icid/exact.hpp"

namespace icid {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string layered(const std::string& name, int layer) { return name + "@" + std::to_string(layer); }

std::vector<std::uint64_t> powers_of_three(int n) {
    std::vector<std::uint64_t> p(n + 1, 1);
    for (int i = 1; i <= n; ++i) p[i] = p[i - 1] * 3;
    return p;
}

// One transition: every fresh or spent node becomes spent; an idle node
// turns fresh with probability `fire[i]`.
void step(const std::vector<double>& from, std::vector<double>& to, const IndexedModel& im,
          const std::vector<std::uint64_t>& pow3, const std::vector<double>* hidden_stay) {
    const int n = im.num_observed;
    std::fill(to.begin(), to.end(), 0.0);
    std::vector<int> digits(n);
    std::vector<int> idle;
    std::vector<double> fire(n);
    for (std::uint64_t code = 0; code < from.size(); ++code) {
        const double w = from[code];
        if (w == 0.0) continue;
        std::uint64_t c = code;
        std::uint64_t base = 0;
        idle.clear();
        for (int i = 0; i < n; ++i) {
            digits[i] = static_cast<int>(c % 3);
            c /= 3;
        }
        for (int i = 0; i < n; ++i) {
            if (digits[i] != kIdle) {
                base += kSpent * pow3[i];
                continue;
            }
            double stay = hidden_stay ? (*hidden_stay)[i] : 1.0;
            for (const auto& link : im.observed_in[i]) {
                if (digits[link.node] == kFresh) stay *= 1.0 - link.weight;
            }
            fire[i] = 1.0 - stay;
            idle.push_back(i);
        }
        const std::uint64_t outcomes = std::uint64_t{1} << idle.size();
        for (std::uint64_t m = 0; m < outcomes; ++m) {
            double p = w;
            std::uint64_t next = base;
            for (std::size_t b = 0; b < idle.size() && p > 0.0; ++b) {
                const int i = idle[b];
                if ((m >> b) & 1U) {
                    p *= fire[i];
                    next += kFresh * pow3[i];
                } else {
                    p *= 1.0 - fire[i];
                }
            }
            if (p > 0.0) to[next] += p;
        }
    }
}

}  // namespace

UnrolledBN unroll(const CausalICModel& model, std::optional<int> horizon) {
    UnrolledBN bn;
    bn.source = model;
    bn.index = index_model(model);
    bn.horizon = horizon.value_or(bn.index.num_observed);
    if (bn.horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be at least 1");
    return bn;
}

std::array<double, 3> unrolled_conditional(const UnrolledBN& bn, int node, int layer, int self_prev,
                                           const std::vector<int>& parent_prev, const std::vector<int>& hidden_parents) {
    const IndexedModel& im = bn.index;
    if (node < 0 || node >= im.num_observed) throw Error(ErrorKind::InvalidArgument, "node index out of range");
    if (layer < 1 || layer > bn.horizon) throw Error(ErrorKind::InvalidArgument, "layer out of range");
    if (self_prev < 0 || self_prev > 2) throw Error(ErrorKind::InvalidArgument, "state must be 0, 1 or 2");
    const auto& parents = im.observed_in[node];
    if (parent_prev.size() != parents.size()) {
        throw Error(ErrorKind::UnassignedParent, "parent state count does not match the node's parents");
    }
    const bool hidden_apply = layer == 1;
    if (hidden_apply && hidden_parents.size() != im.hidden_in[node].size()) {
        throw Error(ErrorKind::UnassignedParent, "layer 1 needs the states of every hidden parent");
    }
    if (self_prev != kIdle) return {0.0, 0.0, 1.0};
    double stay = 1.0;
    for (std::size_t k = 0; k < parents.size(); ++k) {
        if (parent_prev[k] < 0 || parent_prev[k] > 2) throw Error(ErrorKind::InvalidArgument, "state must be 0, 1 or 2");
        if (parent_prev[k] == kFresh) stay *= 1.0 - parents[k].weight;
    }
    if (hidden_apply) {
        for (std::size_t k = 0; k < hidden_parents.size(); ++k) {
            if (hidden_parents[k] == 1) stay *= 1.0 - im.hidden_in[node][k].weight;
        }
    }
    return {stay, 1.0 - stay, 0.0};
}

ObservedDistribution unrolled_final_distribution(const UnrolledBN& bn, const std::vector<std::string>& seeds,
                                                 int max_observed) {
    const IndexedModel& im = bn.index;
    const int n = im.num_observed;
    if (n > max_observed || im.num_hidden > 20) {
        throw Error(ErrorKind::SizeGuardExceeded, "unrolled evaluation supports at most " + std::to_string(max_observed) +
                                                      " observed and 20 hidden nodes");
    }
    const auto pow3 = powers_of_three(n);
    std::uint64_t start = 0;
    for (const auto& s : seeds) start += kFresh * pow3[observed_index(bn.source, s)];

    std::vector<double> cur(pow3[n], 0.0);
    std::vector<double> next(pow3[n], 0.0);
    std::vector<double> layer_one(pow3[n], 0.0);
    // Layer 1 mixes over hidden states; later layers are hidden-free.
    std::vector<double> hidden_stay(n);
    for (std::uint64_t h = 0; h < (std::uint64_t{1} << im.num_hidden); ++h) {
        double w = 1.0;
        for (int k = 0; k < im.num_hidden; ++k) w *= ((h >> k) & 1U) ? im.r[k] : 1.0 - im.r[k];
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            double stay = 1.0;
            for (const auto& link : im.hidden_in[i]) {
                if ((h >> link.node) & 1U) stay *= 1.0 - link.weight;
            }
            hidden_stay[i] = stay;
        }
        std::fill(cur.begin(), cur.end(), 0.0);
        cur[start] = w;
        step(cur, next, im, pow3, &hidden_stay);
        for (std::size_t c = 0; c < next.size(); ++c) layer_one[c] += next[c];
    }
    cur.swap(layer_one);
    for (int t = 2; t <= bn.horizon; ++t) {
        step(cur, next, im, pow3, nullptr);
        cur.swap(next);
    }
    std::vector<double> probs(std::size_t{1} << n, 0.0);
    for (std::uint64_t code = 0; code < cur.size(); ++code) {
        if (cur[code] == 0.0) continue;
        std::uint64_t c = code;
        std::uint64_t mask = 0;
        for (int i = 0; i < n; ++i) {
            if (c % 3 != kIdle) mask |= std::uint64_t{1} << i;
            c /= 3;
        }
        probs[mask] += cur[code];
    }
    return ObservedDistribution(bn.source.observed, std::move(probs), DistributionSource::Unrolled);
}

double check_unroll_equivalence(const CausalICModel& model, const std::vector<std::string>& seeds,
                                std::optional<int> horizon) {
    const ObservedDistribution unrolled = unrolled_final_distribution(unroll(model, horizon), seeds);
    return linf_distance(unrolled, live_edge_exact(model, seeds));
}

std::string unrolled_to_json(const UnrolledBN& bn, std::size_t max_rows) {
    const IndexedModel& im = bn.index;
    const CausalICModel& m = bn.source;
    std::size_t rows = 0;
    for (int i = 0; i < im.num_observed; ++i) {
        std::size_t per = 3;
        for (std::size_t k = 0; k < im.observed_in[i].size(); ++k) per *= 3;
        rows += per * static_cast<std::size_t>(bn.horizon - 1);
        rows += per << im.hidden_in[i].size();
    }
    if (rows > max_rows) throw Error(ErrorKind::SizeGuardExceeded, "unrolled tables exceed " + std::to_string(max_rows) + " rows");

    ordered_json doc;
    doc["horizon"] = bn.horizon;
    ordered_json nodes = ordered_json::array();
    for (const auto& h : m.hidden) nodes.push_back({{"name", h.name}, {"layer", 0}, {"arity", 2}, {"prior", {1.0 - h.r, h.r}}});
    for (int t = 0; t <= bn.horizon; ++t) {
        for (const auto& v : m.observed) nodes.push_back({{"name", layered(v, t)}, {"layer", t}, {"arity", 3}});
    }
    doc["nodes"] = nodes;

    ordered_json edges = ordered_json::array();
    for (int t = 1; t <= bn.horizon; ++t) {
        for (int i = 0; i < im.num_observed; ++i) {
            edges.push_back({layered(m.observed[i], t - 1), layered(m.observed[i], t)});
            for (const auto& link : im.observed_in[i]) {
                edges.push_back({layered(m.observed[link.node], t - 1), layered(m.observed[i], t)});
            }
            if (t == 1) {
                for (const auto& link : im.hidden_in[i]) edges.push_back({m.hidden[link.node].name, layered(m.observed[i], t)});
            }
        }
    }
    doc["edges"] = edges;

    // Rows enumerate parent states with the node's own previous state first,
    // then observed parents, then (layer 1) hidden parents, last one fastest.
    ordered_json tables = ordered_json::array();
    for (int t = 1; t <= bn.horizon; ++t) {
        for (int i = 0; i < im.num_observed; ++i) {
            ordered_json parents = ordered_json::array({layered(m.observed[i], t - 1)});
            for (const auto& link : im.observed_in[i]) parents.push_back(layered(m.observed[link.node], t - 1));
            const std::size_t hidden_count = t == 1 ? im.hidden_in[i].size() : 0;
            for (std::size_t k = 0; k < hidden_count; ++k) parents.push_back(m.hidden[im.hidden_in[i][k].node].name);

            const std::size_t obs_count = im.observed_in[i].size();
            std::size_t combos = 3;
            for (std::size_t k = 0; k < obs_count; ++k) combos *= 3;
            combos <<= hidden_count;
            ordered_json table = ordered_json::array();
            std::vector<int> obs_states(obs_count);
            std::vector<int> hid_states(hidden_count);
            for (std::size_t c = 0; c < combos; ++c) {
                std::size_t rest = c;
                for (std::size_t k = hidden_count; k-- > 0;) {
                    hid_states[k] = static_cast<int>(rest % 2);
                    rest /= 2;
                }
                for (std::size_t k = obs_count; k-- > 0;) {
                    obs_states[k] = static_cast<int>(rest % 3);
                    rest /= 3;
                }
                const int self = static_cast<int>(rest);
                const auto dist = unrolled_conditional(bn, i, t, self, obs_states,
                                                       t == 1 ? hid_states : std::vector<int>{});
                ordered_json states = ordered_json::array({self});
                for (int s : obs_states) states.push_back(s);
                for (int s : hid_states) states.push_back(s);
                table.push_back({{"parents", states}, {"p", {dist[0], dist[1], dist[2]}}});
            }
            tables.push_back({{"node", layered(m.observed[i], t)}, {"parents", parents}, {"rows", table}});
        }
    }
    doc["tables"] = tables;
    return doc.dump(2) + "\n";
}

}  // namespace icid
