#include "icid/global.hpp"

#include <algorithm>
#include <cmath>

#include "icid/error.hpp"
#include "icid/exact.hpp"

namespace icid {

namespace {

// Prefix of length `len` set to zero except for the listed indices.
PartialAssignment zeros_except(int len, std::initializer_list<int> ones) {
    PartialAssignment pa;
    for (int t = 0; t < len; ++t) pa.set(t, false);
    for (int t : ones) pa.set(t, true);
    return pa;
}

double nonzero_threshold(const MarginalSource& dist) {
    if (dist.is_empirical() && dist.sample_count() > 0) {
        return 5.0 / std::sqrt(static_cast<double>(dist.sample_count()));
    }
    return 1e-12;
}

CausalICModel with_global_params(CausalICModel model, const GlobalParams& params) {
    model.hidden[0].r = params.r.value_or(0.0);
    for (auto& e : model.uv_edges) e.q = params.q[observed_index(model, e.to)].value_or(0.0);
    for (std::size_t k = 0; k < model.vv_edges.size(); ++k) model.vv_edges[k].p = params.p[k].value.value_or(0.0);
    return model;
}

}  // namespace

std::set<int> detect_nonzero_q(const MarginalSource& dist, int n) {
    if (dist.num_nodes() != n) throw Error(ErrorKind::InvalidArgument, "distribution size does not match n");
    const double threshold = nonzero_threshold(dist);
    std::set<int> out;
    for (int t = 0; t < n; ++t) {
        if (dist.marginal(zeros_except(t + 1, {t})) > threshold) out.insert(t);
    }
    return out;
}

GlobalParams identify_global(const MarginalSource& dist, const CausalICModel& skeleton, const GlobalOptions& options) {
    if (classify(skeleton) != ModelClass::GlobalHidden) {
        throw Error(ErrorKind::ClassMismatch, "skeleton does not have a single global hidden node");
    }
    const int n = static_cast<int>(skeleton.observed.size());
    if (dist.num_nodes() != n) throw Error(ErrorKind::InvalidArgument, "distribution and skeleton differ in node count");
    const bool lenient = dist.is_empirical() && !options.strict;
    const IndexedModel im = index_model(skeleton);

    GlobalParams out;
    out.nodes = skeleton.observed;
    out.q.assign(n, std::nullopt);

    const std::set<int> nonzero = detect_nonzero_q(dist, n);
    if (nonzero.size() < 3) {
        throw Error(ErrorKind::PreconditionViolated,
                    "need at least three nodes with a nonzero global weight, found " + std::to_string(nonzero.size()));
    }
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (int v = 0; v < n; ++v) {
        for (const auto& link : im.observed_in[v]) edge[link.node][v] = edge[v][link.node] = true;
    }

    auto P = [&](const PartialAssignment& pa) { return dist.marginal(pa); };
    auto ratio = [&](double num, double den, const char* what) {
        if (den <= 1e-300) {
            throw Error(ErrorKind::PreconditionViolated, std::string("a probability needed for ") + what + " is zero");
        }
        return num / den;
    };
    auto clip = [&](double v, const std::string& what) { return clip_probability(v, what, out.warnings); };

    // Pin down one q, then r through the all-zero prefixes around it.
    int anchor = -1;
    double anchor_q = 0.0;
    const std::vector<int> nz(nonzero.begin(), nonzero.end());
    for (std::size_t a = 0; a < nz.size() && anchor < 0; ++a) {
        for (std::size_t b = a + 1; b < nz.size(); ++b) {
            const int i = nz[a];
            const int j = nz[b];
            if (edge[i][j]) continue;
            anchor = j;
            anchor_q = 1.0 - ratio(P(zeros_except(j + 1, {i})), P(zeros_except(j, {i})), "the pair ratio");
            out.algorithm_case = 1;
            out.pivots = {i, j};
            break;
        }
    }
    if (anchor < 0) {
        const int i = nz[0];
        const int j = nz[1];
        const int k = nz[2];
        const double qi = ratio(P(zeros_except(k + 1, {i})), P(zeros_except(k, {i})), "the triple ratios");
        const double qj = ratio(P(zeros_except(k + 1, {j})), P(zeros_except(k, {j})), "the triple ratios");
        const double qij = ratio(P(zeros_except(k + 1, {i, j})), P(zeros_except(k, {i, j})), "the triple ratios");
        anchor = k;
        anchor_q = 1.0 - ratio(qi * qj, qij, "the triple ratios");
        out.algorithm_case = 2;
        out.pivots = {i, j, k};
    }
    anchor_q = clip(anchor_q, "q of " + skeleton.observed[anchor]);
    if (anchor_q <= 0.0) throw Error(ErrorKind::PreconditionViolated, "anchor node has a vanishing global weight");

    const double before = anchor == 0 ? 1.0 : P(zeros_except(anchor, {}));
    const double active_mass = (before - P(zeros_except(anchor + 1, {}))) / anchor_q;
    const double r = clip(1.0 - (before - active_mass), "r");
    if (r <= 0.0) throw Error(ErrorKind::PreconditionViolated, "recovered r is zero");
    out.r = r;

    double mass = r;  // r times the product of (1 - q) over the prefix
    for (int t = 0; t < n; ++t) {
        const double q = clip(ratio(P(zeros_except(t + 1, {t})), mass, "q"), "q of " + skeleton.observed[t]);
        out.q[t] = q;
        mass *= 1.0 - q;
    }

    // Any active node implies the global node is on, so with at least one
    // parent active, P(Vt = 0 | parent pattern) is (1 - q_t) times the
    // product of (1 - p) over the active parents. Edge s -> t is isolated by
    // two patterns that differ only in s, the smaller active sets first.
    for (const auto& e : skeleton.vv_edges) {
        const int s = observed_index(skeleton, e.from);
        const int t = observed_index(skeleton, e.to);
        EdgeEstimate est{e.from, e.to, std::nullopt};
        std::vector<int> others;
        for (const auto& link : im.observed_in[t]) {
            if (link.node != s) others.push_back(link.node);
        }
        auto stay_given = [&](std::uint64_t subset, bool with_s) -> std::optional<double> {
            PartialAssignment given;
            given.set(s, with_s);
            for (std::size_t o = 0; o < others.size(); ++o) given.set(others[o], (subset >> o) & 1U);
            const double den = P(given);
            if (den <= 1e-300) return std::nullopt;
            given.set(t, false);
            return P(given) / den;
        };
        std::vector<std::uint64_t> subsets(std::uint64_t{1} << others.size());
        for (std::uint64_t m = 0; m < subsets.size(); ++m) subsets[m] = m;
        std::stable_sort(subsets.begin(), subsets.end(), [](std::uint64_t x, std::uint64_t y) {
            return __builtin_popcountll(x) < __builtin_popcountll(y);
        });
        const double qt = *out.q[t];
        for (std::uint64_t subset : subsets) {
            const auto with = stay_given(subset, true);
            if (!with) continue;
            std::optional<double> without;
            if (subset == 0) {
                if (qt < 1.0) without = 1.0 - qt;
            } else {
                without = stay_given(subset, false);
            }
            if (!without || *without <= 0.0) continue;
            est.value = clip(1.0 - *with / *without, "p of " + edge_label(e.from, e.to));
            break;
        }
        if (!est.value) {
            if (options.strict) {
                throw Error(ErrorKind::PreconditionViolated, "edge " + edge_label(e.from, e.to) + " cannot be isolated");
            }
            out.unidentifiable.push_back(edge_label(e.from, e.to));
        }
        out.p.push_back(std::move(est));
    }

    if (options.resimulate && n + 1 <= SizeGuard{}.max_units) {
        const ObservedDistribution sim = exact_joint(with_global_params(skeleton, out));
        double gap = 0.0;
        for (std::uint64_t m = 0; m < sim.probabilities().size(); ++m) {
            gap = std::max(gap, std::fabs(sim.probability(m) - dist.marginal(PartialAssignment::full(m, n))));
        }
        out.resimulation_gap = gap;
        if (gap > 1e-8) {
            const std::string message = "recovered parameters reproduce the distribution only to " + format_double(gap);
            if (lenient) {
                out.warnings.push_back(message);
            } else {
                throw Error(ErrorKind::PreconditionViolated, message);
            }
        }
    }
    return out;
}

GlobalParams global_truth(const CausalICModel& model) {
    if (classify(model) != ModelClass::GlobalHidden) throw Error(ErrorKind::ClassMismatch, "model is not global-hidden");
    GlobalParams out;
    out.nodes = model.observed;
    out.r = model.hidden[0].r;
    out.q.assign(model.observed.size(), 0.0);
    for (const auto& e : model.uv_edges) out.q[observed_index(model, e.to)] = e.q;
    for (const auto& e : model.vv_edges) out.p.push_back({e.from, e.to, e.p});
    return out;
}

namespace {

double estimate_gap(const Estimate& a, const Estimate& b) { return a && b ? std::fabs(*a - *b) : 0.0; }

double edges_gap(const std::vector<EdgeEstimate>& a, const std::vector<EdgeEstimate>& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "parameter sets list different edges");
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].from != b[k].from || a[k].to != b[k].to) {
            throw Error(ErrorKind::InvalidArgument, "parameter sets list edges in different orders");
        }
        gap = std::max(gap, estimate_gap(a[k].value, b[k].value));
    }
    return gap;
}

double estimates_gap(const std::vector<Estimate>& a, const std::vector<Estimate>& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "parameter sets differ in size");
    double gap = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, estimate_gap(a[k], b[k]));
    return gap;
}

}  // namespace

double max_abs_difference(const GlobalParams& a, const GlobalParams& b) {
    return std::max({estimate_gap(a.r, b.r), estimates_gap(a.q, b.q), edges_gap(a.p, b.p)});
}

double max_abs_difference(const MixedParams& a, const MixedParams& b) {
    return std::max({estimate_gap(a.r0, b.r0), estimates_gap(a.q0, b.q0), estimates_gap(a.q, b.q), edges_gap(a.p, b.p)});
}

std::vector<DisconnectedTriple> disconnected_triples(const CausalICModel& model, const std::set<int>& allowed) {
    const IndexedModel im = index_model(model);
    const auto reach = observed_reachability(model);
    const int n = im.num_observed;
    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (int v = 0; v < n; ++v) {
        for (const auto& link : im.observed_in[v]) edge[link.node][v] = edge[v][link.node] = true;
    }
    const std::vector<int> idx(allowed.begin(), allowed.end());
    std::vector<DisconnectedTriple> adjacent;
    std::vector<DisconnectedTriple> spread;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            for (std::size_t c = b + 1; c < idx.size(); ++c) {
                const int i = idx[a], j = idx[b], k = idx[c];
                if (edge[i][j] || edge[i][k] || edge[j][k]) continue;
                // Consecutive placement fails exactly when some outside node
                // lies on a path between two members of the triple.
                bool squeezed = false;
                for (int z = 0; z < n && !squeezed; ++z) {
                    if (z == i || z == j || z == k) continue;
                    const bool below = reach[i][z] || reach[j][z] || reach[k][z];
                    const bool above = reach[z][i] || reach[z][j] || reach[z][k];
                    squeezed = below && above;
                }
                (squeezed ? spread : adjacent).push_back({i, j, k, !squeezed});
            }
        }
    }
    adjacent.insert(adjacent.end(), spread.begin(), spread.end());
    return adjacent;
}

std::optional<DisconnectedTriple> find_disconnected_triple(const CausalICModel& model, const std::set<int>& allowed) {
    auto all = disconnected_triples(model, allowed);
    if (all.empty()) return std::nullopt;
    return all.front();
}

}  // namespace icid
