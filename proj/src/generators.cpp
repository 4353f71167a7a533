#include "icid/generators.hpp"

#include <algorithm>
#include <numeric>

#include "icid/error.hpp"
#include "icid/global.hpp"

namespace icid {

namespace {

std::string vname(int i) { return "V" + std::to_string(i + 1); }

double draw(CounterRng& rng, ParamRange range) { return rng.uniform(range.lo, range.hi); }

std::vector<std::string> observed_names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(vname(i));
    return out;
}

void random_forward_edges(CounterRng& rng, CausalICModel& m, int n, double edge_prob, ParamRange range) {
    for (int b = 1; b < n; ++b) {
        for (int a = 0; a < b; ++a) {
            if (rng.bernoulli(edge_prob)) m.vv_edges.push_back({vname(a), vname(b), draw(rng, range)});
        }
    }
}

void add_global_and_private(CounterRng& rng, CausalICModel& m, int n, ParamRange range) {
    m.hidden.push_back({"U0", draw(rng, range)});
    for (int t = 0; t < n; ++t) m.uv_edges.push_back({"U0", vname(t), draw(rng, range)});
    for (int t = 0; t < n; ++t) {
        const std::string u = "U" + std::to_string(t + 1);
        m.hidden.push_back({u, draw(rng, range)});
        m.uv_edges.push_back({u, vname(t), draw(rng, range)});
    }
}

}  // namespace

CausalICModel random_markovian(CounterRng& rng, int n, int max_in_degree, ParamRange range) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
    CausalICModel m;
    m.observed = observed_names(n);
    for (int t = 0; t < n; ++t) {
        const std::string u = "U" + std::to_string(t + 1);
        m.hidden.push_back({u, draw(rng, range)});
        m.uv_edges.push_back({u, vname(t), draw(rng, range)});
    }
    for (int t = 1; t < n; ++t) {
        std::vector<int> pool(t);
        std::iota(pool.begin(), pool.end(), 0);
        const int degree = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(t, max_in_degree) + 1)));
        for (int d = 0; d < degree; ++d) {
            const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
            m.vv_edges.push_back({vname(pool[pick]), vname(t), draw(rng, range)});
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
    }
    std::stable_sort(m.vv_edges.begin(), m.vv_edges.end(), [&](const ObservedEdge& x, const ObservedEdge& y) {
        return observed_index(m, x.to) < observed_index(m, y.to);
    });
    return m;
}

ChainParams random_chain(CounterRng& rng, int n, ParamRange range) {
    ChainParams c = ChainParams::uniform(n, 0.5);
    for (auto* field : {&c.p, &c.r, &c.q1, &c.q2}) {
        for (double& v : *field) v = draw(rng, range);
    }
    return c;
}

CausalICModel random_global(CounterRng& rng, int n, double edge_prob, double zero_q_prob, ParamRange range) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "global models need at least three nodes");
    CausalICModel m;
    m.observed = observed_names(n);
    m.hidden.push_back({"U0", draw(rng, range)});
    std::vector<double> q(n);
    for (double& v : q) v = rng.bernoulli(zero_q_prob) ? 0.0 : draw(rng, range);
    while (std::count_if(q.begin(), q.end(), [](double v) { return v > 0.0; }) < 3) {
        q[rng.below(static_cast<std::uint64_t>(n))] = draw(rng, range);
    }
    for (int t = 0; t < n; ++t) m.uv_edges.push_back({"U0", vname(t), q[t]});
    random_forward_edges(rng, m, n, edge_prob, range);
    return m;
}

CausalICModel random_mixed_adjacent(CounterRng& rng, int n, double edge_prob, ParamRange range) {
    if (n < 3) throw Error(ErrorKind::InvalidArgument, "mixed models need at least three nodes");
    std::set<int> all;
    for (int t = 0; t < n; ++t) all.insert(t);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        CausalICModel m;
        m.observed = observed_names(n);
        add_global_and_private(rng, m, n, range);
        random_forward_edges(rng, m, n, edge_prob, range);
        const auto triple = find_disconnected_triple(m, all);
        if (triple && triple->adjacent) return m;
    }
    throw Error(ErrorKind::InvalidArgument, "could not draw a mixed model with an adjacent triple");
}

CausalICModel random_mixed_spread(CounterRng& rng, int n, ParamRange range) {
    if (n < 4) throw Error(ErrorKind::InvalidArgument, "a split triple needs at least four nodes");
    // Core: A -> Z -> C with B unrelated, in order A Z B C or A B Z C.
    CausalICModel m;
    m.observed = observed_names(n);
    add_global_and_private(rng, m, n, range);
    const bool z_first = rng.bernoulli(0.5);
    const int a = 0, z = z_first ? 1 : 2, c = 3;
    m.vv_edges.push_back({vname(a), vname(z), draw(rng, range)});
    m.vv_edges.push_back({vname(z), vname(c), draw(rng, range)});
    // Later nodes hear from every earlier node so no new triple appears.
    for (int t = 4; t < n; ++t) {
        for (int s = 0; s < t; ++s) m.vv_edges.push_back({vname(s), vname(t), draw(rng, range)});
    }
    return m;
}

CausalICModel random_dag(CounterRng& rng, int n, int num_hidden, int max_vv_edges, int max_uv_edges,
                         ParamRange range) {
    CausalICModel m;
    m.observed = observed_names(n);
    std::vector<std::pair<int, int>> pairs;
    for (int b = 1; b < n; ++b) {
        for (int a = 0; a < b; ++a) pairs.emplace_back(a, b);
    }
    const auto vv_count = std::min<std::size_t>(pairs.size(), rng.below(static_cast<std::uint64_t>(max_vv_edges) + 1));
    for (std::size_t e = 0; e < vv_count; ++e) {
        const auto pick = static_cast<std::size_t>(rng.below(pairs.size()));
        m.vv_edges.push_back({vname(pairs[pick].first), vname(pairs[pick].second), draw(rng, range)});
        pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    int uv_budget = max_uv_edges;
    for (int k = 0; k < num_hidden && uv_budget > 0; ++k) {
        const std::string u = "U" + std::to_string(k + 1);
        m.hidden.push_back({u, draw(rng, range)});
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        const int fanout = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, uv_budget))));
        for (int f = 0; f < fanout; ++f) {
            const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
            m.uv_edges.push_back({u, vname(pool[pick]), draw(rng, range)});
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        uv_budget -= fanout;
    }
    return m;
}

CausalICModel random_cyclic(CounterRng& rng, int n, int num_edges, int num_hidden, ParamRange range) {
    CausalICModel m;
    m.allow_cycles = true;
    m.observed = observed_names(n);
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a != b) pairs.emplace_back(a, b);
        }
    }
    for (int e = 0; e < num_edges && !pairs.empty(); ++e) {
        const auto pick = static_cast<std::size_t>(rng.below(pairs.size()));
        m.vv_edges.push_back({vname(pairs[pick].first), vname(pairs[pick].second), draw(rng, range)});
        pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    for (int k = 0; k < num_hidden; ++k) {
        const std::string u = "U" + std::to_string(k + 1);
        m.hidden.push_back({u, draw(rng, range)});
        m.uv_edges.push_back({u, vname(static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))), draw(rng, range)});
    }
    return m;
}

}  // namespace icid
