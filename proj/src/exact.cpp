#include "icid/exact.hpp"

#include <algorithm>

#include "icid/error.hpp"
#include "icid/rng.hpp"

namespace icid {

namespace {

void require_forward_edges(const IndexedModel& im) {
    for (int v = 0; v < im.num_observed; ++v) {
        for (const auto& link : im.observed_in[v]) {
            if (link.node >= v) {
                throw Error(ErrorKind::InvalidModel,
                            "exact enumeration needs vv edges that follow the observed order");
            }
        }
    }
}

std::vector<std::string> names_of(const CausalICModel& model) { return model.observed; }

std::uint64_t seed_mask(const CausalICModel& model, const std::vector<std::string>& seeds) {
    std::uint64_t mask = 0;
    for (const auto& s : seeds) mask |= std::uint64_t{1} << observed_index(model, s);
    return mask;
}

// Hidden states with nonzero weight, in increasing mask order.
std::vector<std::pair<std::uint64_t, double>> hidden_states(const IndexedModel& im) {
    std::vector<std::pair<std::uint64_t, double>> out;
    const std::uint64_t count = std::uint64_t{1} << im.num_hidden;
    for (std::uint64_t u = 0; u < count; ++u) {
        double w = 1.0;
        for (int k = 0; k < im.num_hidden && w > 0.0; ++k) {
            w *= ((u >> k) & 1U) ? im.r[k] : 1.0 - im.r[k];
        }
        if (w > 0.0) out.emplace_back(u, w);
    }
    return out;
}

struct JointWalker {
    const IndexedModel& im;
    std::vector<double> hidden_factor;
    std::vector<CompensatedSum>& sums;

    void walk(int i, std::uint64_t mask, double weight) {
        if (i == im.num_observed) {
            sums[mask].add(weight);
            return;
        }
        double stay = hidden_factor[i];
        for (const auto& link : im.observed_in[i]) {
            if ((mask >> link.node) & 1U) stay *= 1.0 - link.weight;
        }
        const double on = 1.0 - stay;
        if (stay > 0.0) walk(i + 1, mask, weight * stay);
        if (on > 0.0) walk(i + 1, mask | (std::uint64_t{1} << i), weight * on);
    }
};

struct LiveEdge {
    int from;  // observed index, or -1 for a hidden source
    int to;
    double p;
};

std::uint64_t closure(std::uint64_t active, const std::vector<LiveEdge>& live) {
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : live) {
            if (((active >> e.from) & 1U) && !((active >> e.to) & 1U)) {
                active |= std::uint64_t{1} << e.to;
                grew = true;
            }
        }
    }
    return active;
}

Cascade simulate(const IndexedModel& im, std::uint64_t seeded, std::uint64_t rng_seed);

}  // namespace

double activation_probability(const CausalICModel& model, const std::string& node,
                              const std::map<std::string, int>& states) {
    const IndexedModel im = index_model(model);
    const int v = observed_index(model, node);
    auto state_of = [&](const std::string& name) {
        auto it = states.find(name);
        if (it == states.end()) throw Error(ErrorKind::UnassignedParent, "parent " + name + " of " + node + " is unassigned");
        return it->second != 0;
    };
    double stay = 1.0;
    for (const auto& link : im.observed_in[v]) {
        if (state_of(model.observed[link.node])) stay *= 1.0 - link.weight;
    }
    for (const auto& link : im.hidden_in[v]) {
        if (state_of(model.hidden[link.node].name)) stay *= 1.0 - link.weight;
    }
    return 1.0 - stay;
}

ObservedDistribution exact_joint(const CausalICModel& model, SizeGuard guard) {
    const IndexedModel im = index_model(model);
    if (im.num_hidden + im.num_observed > guard.max_units) {
        throw Error(ErrorKind::SizeGuardExceeded, "exact_joint needs |U|+|V| <= " + std::to_string(guard.max_units));
    }
    require_forward_edges(im);
    const int n = im.num_observed;
    std::vector<CompensatedSum> sums(std::size_t{1} << n);
    JointWalker walker{im, std::vector<double>(n, 1.0), sums};
    for (const auto& [u, w] : hidden_states(im)) {
        for (int i = 0; i < n; ++i) {
            double stay = 1.0;
            for (const auto& link : im.hidden_in[i]) {
                if ((u >> link.node) & 1U) stay *= 1.0 - link.weight;
            }
            walker.hidden_factor[i] = stay;
        }
        walker.walk(0, 0, w);
    }
    std::vector<double> probs(sums.size());
    for (std::size_t m = 0; m < sums.size(); ++m) probs[m] = sums[m].value();
    return ObservedDistribution(names_of(model), std::move(probs), DistributionSource::Exact);
}

ObservedDistribution live_edge_exact(const CausalICModel& model, const std::vector<std::string>& seeds,
                                     SizeGuard guard) {
    const IndexedModel im = index_model(model);
    const auto units = im.num_hidden + model.vv_edges.size() + model.uv_edges.size();
    if (units > static_cast<std::size_t>(guard.max_units)) {
        throw Error(ErrorKind::SizeGuardExceeded, "live_edge_exact needs |U|+|E| <= " + std::to_string(guard.max_units));
    }
    const int n = im.num_observed;
    if (n > kMaxDenseNodes) throw Error(ErrorKind::SizeGuardExceeded, "too many observed nodes");
    const std::uint64_t seeded = seed_mask(model, seeds);

    std::vector<LiveEdge> vv;
    for (int a = 0; a < n; ++a) {
        for (const auto& link : im.observed_out[a]) vv.push_back({a, link.node, link.weight});
    }
    std::vector<CompensatedSum> sums(std::size_t{1} << n);

    for (const auto& [u, wu] : hidden_states(im)) {
        // Edges out of inactive hidden nodes cannot matter, so only the
        // edges of active ones are enumerated.
        std::vector<LiveEdge> candidates;
        for (int k = 0; k < im.num_hidden; ++k) {
            if (!((u >> k) & 1U)) continue;
            for (const auto& link : im.hidden_out[k]) candidates.push_back({-1, link.node, link.weight});
        }
        const std::size_t hidden_edges = candidates.size();
        candidates.insert(candidates.end(), vv.begin(), vv.end());

        std::vector<LiveEdge> live;
        auto visit = [&](auto&& self, std::size_t idx, std::uint64_t start, double w) -> void {
            if (idx == candidates.size()) {
                sums[closure(start, live)].add(w);
                return;
            }
            const LiveEdge& e = candidates[idx];
            if (e.p < 1.0) self(self, idx + 1, start, w * (1.0 - e.p));
            if (e.p > 0.0) {
                if (idx < hidden_edges) {
                    self(self, idx + 1, start | (std::uint64_t{1} << e.to), w * e.p);
                } else {
                    live.push_back(e);
                    self(self, idx + 1, start, w * e.p);
                    live.pop_back();
                }
            }
        };
        visit(visit, 0, seeded, wu);
    }
    std::vector<double> probs(sums.size());
    for (std::size_t m = 0; m < sums.size(); ++m) probs[m] = sums[m].value();
    return ObservedDistribution(names_of(model), std::move(probs), DistributionSource::LiveEdge);
}

Cascade sample_cascade(const CausalICModel& model, const std::vector<std::string>& seeds, std::uint64_t rng_seed) {
    const IndexedModel im = index_model(model);
    if (im.num_observed > 64) throw Error(ErrorKind::SizeGuardExceeded, "cascades support at most 64 observed nodes");
    return simulate(im, seed_mask(model, seeds), rng_seed);
}

namespace {

Cascade simulate(const IndexedModel& im, std::uint64_t seeded, std::uint64_t rng_seed) {
    CounterRng rng(rng_seed);
    Cascade c;
    for (int k = 0; k < im.num_hidden; ++k) {
        if (rng.bernoulli(im.r[k])) c.hidden_active |= std::uint64_t{1} << k;
    }
    std::uint64_t active = seeded;
    for (int k = 0; k < im.num_hidden; ++k) {
        if (!((c.hidden_active >> k) & 1U)) continue;
        for (const auto& link : im.hidden_out[k]) {
            const std::uint64_t bit = std::uint64_t{1} << link.node;
            if (!(active & bit) && rng.bernoulli(link.weight)) active |= bit;
        }
    }
    c.rounds.push_back(active);
    std::uint64_t fresh = active;
    while (fresh != 0) {
        std::uint64_t next = active;
        for (int v = 0; v < im.num_observed; ++v) {
            if (!((fresh >> v) & 1U)) continue;
            for (const auto& link : im.observed_out[v]) {
                const std::uint64_t bit = std::uint64_t{1} << link.node;
                if (!(next & bit) && rng.bernoulli(link.weight)) next |= bit;
            }
        }
        fresh = next & ~active;
        active = next;
        if (fresh != 0) c.rounds.push_back(active);
    }
    c.final_state = active;
    return c;
}

}  // namespace

ObservedDistribution empirical_distribution(const CausalICModel& model, std::uint64_t num_samples,
                                            std::uint64_t rng_seed) {
    if (num_samples == 0) throw Error(ErrorKind::InvalidArgument, "num_samples must be at least 1");
    const int n = static_cast<int>(model.observed.size());
    if (n > kMaxDenseNodes) throw Error(ErrorKind::SizeGuardExceeded, "too many observed nodes");
    const IndexedModel im = index_model(model);
    std::vector<std::uint64_t> counts(std::size_t{1} << n, 0);
    for (std::uint64_t k = 0; k < num_samples; ++k) {
        ++counts[simulate(im, 0, CounterRng::stream_seed(rng_seed, k)).final_state];
    }
    std::vector<double> probs(counts.size());
    for (std::size_t m = 0; m < counts.size(); ++m) {
        probs[m] = static_cast<double>(counts[m]) / static_cast<double>(num_samples);
    }
    return ObservedDistribution(names_of(model), std::move(probs), DistributionSource::Empirical, num_samples);
}

}  // namespace icid
