#include "oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace oracle {

namespace {

int index_of(const std::vector<std::string>& names, const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("unknown node " + name);
    return static_cast<int>(it - names.begin());
}

std::vector<std::string> hidden_names(const icid::CausalICModel& model) {
    std::vector<std::string> out;
    for (const auto& h : model.hidden) out.push_back(h.name);
    return out;
}

}  // namespace

FullJoint full_joint(const icid::CausalICModel& model, const std::vector<std::string>& seeds) {
    const int n = static_cast<int>(model.observed.size());
    const int h = static_cast<int>(model.hidden.size());
    const auto hidden = hidden_names(model);
    const int ev = static_cast<int>(model.vv_edges.size());
    const int eu = static_cast<int>(model.uv_edges.size());
    if (n + h > 24 || h + ev + eu > 24) throw std::invalid_argument("oracle too large");

    std::vector<std::pair<int, int>> vv;
    for (const auto& e : model.vv_edges) vv.emplace_back(index_of(model.observed, e.from), index_of(model.observed, e.to));
    std::vector<std::pair<int, int>> uv;
    for (const auto& e : model.uv_edges) uv.emplace_back(index_of(hidden, e.from), index_of(model.observed, e.to));
    std::uint64_t seed_mask = 0;
    for (const auto& s : seeds) seed_mask |= std::uint64_t{1} << index_of(model.observed, s);

    FullJoint out;
    out.n = n;
    out.h = h;
    out.probs.assign(std::size_t{1} << (n + h), 0.0);
    const std::uint64_t outcomes = std::uint64_t{1} << (h + ev + eu);
    for (std::uint64_t w = 0; w < outcomes; ++w) {
        double prob = 1.0;
        const std::uint64_t hid = w & ((std::uint64_t{1} << h) - 1);
        for (int k = 0; k < h; ++k) prob *= ((hid >> k) & 1U) ? model.hidden[k].r : 1.0 - model.hidden[k].r;
        std::uint64_t active = seed_mask;
        for (int e = 0; e < eu; ++e) {
            const bool live = (w >> (h + ev + e)) & 1U;
            prob *= live ? model.uv_edges[e].q : 1.0 - model.uv_edges[e].q;
            if (live && ((hid >> uv[e].first) & 1U)) active |= std::uint64_t{1} << uv[e].second;
        }
        std::vector<bool> live_vv(ev);
        for (int e = 0; e < ev; ++e) {
            live_vv[e] = (w >> (h + e)) & 1U;
            prob *= live_vv[e] ? model.vv_edges[e].p : 1.0 - model.vv_edges[e].p;
        }
        if (prob == 0.0) continue;
        // Fixed point of reachability through live edges.
        for (bool changed = true; changed;) {
            changed = false;
            for (int e = 0; e < ev; ++e) {
                if (live_vv[e] && ((active >> vv[e].first) & 1U) && !((active >> vv[e].second) & 1U)) {
                    active |= std::uint64_t{1} << vv[e].second;
                    changed = true;
                }
            }
        }
        out.probs[active | (hid << n)] += prob;
    }
    return out;
}

double FullJoint::observed_marginal(const std::string& prefix_bits) const {
    double total = 0.0;
    for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
        bool match = true;
        for (std::size_t i = 0; i < prefix_bits.size() && match; ++i) match = ((idx >> i) & 1U) == (prefix_bits[i] == '1');
        if (match) total += probs[idx];
    }
    return total;
}

double FullJoint::with_hidden(const std::string& prefix_bits, int hidden, int hidden_state) const {
    double total = 0.0;
    for (std::uint64_t idx = 0; idx < probs.size(); ++idx) {
        if (static_cast<int>((idx >> (n + hidden)) & 1U) != hidden_state) continue;
        bool match = true;
        for (std::size_t i = 0; i < prefix_bits.size() && match; ++i) match = ((idx >> i) & 1U) == (prefix_bits[i] == '1');
        if (match) total += probs[idx];
    }
    return total;
}

icid::ObservedDistribution FullJoint::observed() const {
    std::vector<double> obs(std::size_t{1} << n, 0.0);
    for (std::uint64_t idx = 0; idx < probs.size(); ++idx) obs[idx & ((std::uint64_t{1} << n) - 1)] += probs[idx];
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i + 1));
    return icid::ObservedDistribution(names, obs, icid::DistributionSource::Exact);
}

std::vector<std::vector<std::string>> topological_orders(const icid::CausalICModel& model) {
    std::vector<std::string> perm = model.observed;
    std::sort(perm.begin(), perm.end());
    std::vector<std::vector<std::string>> out;
    do {
        bool ok = true;
        for (const auto& e : model.vv_edges) {
            if (index_of(perm, e.from) > index_of(perm, e.to)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

bool consecutive_somewhere(const icid::CausalICModel& model, const std::set<std::string>& nodes) {
    for (const auto& order : topological_orders(model)) {
        for (std::size_t s = 0; s + nodes.size() <= order.size(); ++s) {
            std::set<std::string> window(order.begin() + static_cast<long>(s),
                                         order.begin() + static_cast<long>(s + nodes.size()));
            if (window == nodes) return true;
        }
    }
    return false;
}

double CountingSource::marginal(const icid::PartialAssignment& partial) const {
    ++calls_;
    seen_.emplace(partial.care, partial.value & partial.care);
    for (int i = 63; i >= 0; --i) {
        if ((partial.care >> i) & 1U) {
            widest_ = std::max(widest_, i + 1);
            break;
        }
    }
    return inner_.marginal(partial);
}

bool CountingSource::only_prefixes() const {
    for (const auto& [care, value] : seen_) {
        if ((care & (care + 1)) != 0) return false;
    }
    return true;
}

std::map<std::string, double> markovian_parameters(const icid::CausalICModel& model) {
    std::map<std::string, double> out;
    for (const auto& v : model.observed) out["q:" + v] = 0.0;
    for (const auto& e : model.uv_edges) {
        for (const auto& h : model.hidden) {
            if (h.name == e.from) out["q:" + e.to] = h.r * e.q;
        }
    }
    for (const auto& e : model.vv_edges) out["p:" + e.from + "->" + e.to] = e.p;
    return out;
}

}  // namespace oracle
