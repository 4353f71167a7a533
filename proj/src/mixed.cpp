#include <algorithm>
#include <cmath>
#include <map>

#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/global.hpp"

namespace icid {

namespace {

constexpr double kTiny = 1e-300;

// Presents a base source under a node reordering: working node w is base
// node perm[w].
class PermutedSource final : public MarginalSource {
public:
    PermutedSource(const MarginalSource& base, std::vector<int> perm) : base_(base), perm_(std::move(perm)) {}

    int num_nodes() const override { return base_.num_nodes(); }
    DistributionSource source() const override { return base_.source(); }
    std::uint64_t sample_count() const override { return base_.sample_count(); }

    double marginal(const PartialAssignment& partial) const override {
        PartialAssignment mapped;
        for (int w = 0; w < static_cast<int>(perm_.size()); ++w) {
            if (partial.assigned(w)) mapped.set(perm_[w], partial.state(w));
        }
        return base_.marginal(mapped);
    }

private:
    const MarginalSource& base_;
    std::vector<int> perm_;
};

PartialAssignment zeros_except(int len, std::initializer_list<int> ones) {
    PartialAssignment pa;
    for (int t = 0; t < len; ++t) pa.set(t, false);
    for (int t : ones) pa.set(t, true);
    return pa;
}

// The eight probabilities over prefix length `len` around triple (i, j, k),
// with the first |base.care| bits fixed by `base`.
std::array<double, 8> triple_probs(const MarginalSource& dist, int len, int i, int j, int k,
                                   const PartialAssignment& base = {}) {
    auto P = [&](std::initializer_list<int> ones) {
        PartialAssignment pa = zeros_except(len, ones);
        for (int t = 0; t < len; ++t) {
            if (base.assigned(t)) pa.set(t, base.state(t));
        }
        return dist.marginal(pa);
    };
    return {P({}), P({i}), P({j}), P({k}), P({i, j}), P({i, k}), P({j, k}), P({i, j, k})};
}

double sign_product(const std::array<double, 8>& p) {
    return (p[1] * p[2] - p[0] * p[4]) * (p[1] * p[3] - p[0] * p[5]) * (p[2] * p[3] - p[0] * p[6]);
}

// Nodes that must precede the triple come first, then the triple, then the
// rest; each group keeps the original relative order.
std::vector<int> consecutive_order(const CausalICModel& model, const DisconnectedTriple& t) {
    const auto reach = observed_reachability(model);
    const int n = static_cast<int>(model.observed.size());
    std::vector<int> before;
    std::vector<int> after;
    for (int z = 0; z < n; ++z) {
        if (z == t.i || z == t.j || z == t.k) continue;
        (reach[z][t.i] || reach[z][t.j] || reach[z][t.k] ? before : after).push_back(z);
    }
    std::vector<int> order = before;
    order.insert(order.end(), {t.i, t.j, t.k});
    order.insert(order.end(), after.begin(), after.end());
    return order;
}

CausalICModel reordered(const CausalICModel& model, const std::vector<int>& order) {
    CausalICModel out = model;
    out.observed.clear();
    for (int w : order) out.observed.push_back(model.observed[w]);
    return out;
}

CausalICModel with_mixed_params(CausalICModel model, const MixedParams& params, const GlobalLayout& layout) {
    const int n = static_cast<int>(model.observed.size());
    model.hidden[layout.global_hidden].r = params.r0.value_or(0.0);
    for (int t = 0; t < n; ++t) {
        // The private parent's r and q only matter through their product.
        model.hidden[layout.private_hidden[t]].r = 1.0;
    }
    for (auto& e : model.uv_edges) {
        const int t = observed_index(model, e.to);
        if (e.from == model.hidden[layout.global_hidden].name) {
            e.q = params.q0[t].value_or(0.0);
        } else {
            e.q = params.q[t].value_or(0.0);
        }
    }
    for (std::size_t k = 0; k < model.vv_edges.size(); ++k) model.vv_edges[k].p = params.p[k].value.value_or(0.0);
    return model;
}

}  // namespace

MixedSolverState solve_triple(const std::array<double, 8>& probs) {
    const auto [p1, p2, p3, p4, p5, p6, p7, p8] = probs;
    MixedSolverState s;
    s.probs = probs;
    s.sign_product = sign_product(probs);

    const double inner = p1 * p1 * p8 * p8 - 2 * p1 * p2 * p7 * p8 - 2 * p1 * p3 * p6 * p8 - 2 * p1 * p4 * p5 * p8 +
                         4 * p1 * p5 * p6 * p7 + p2 * p2 * p7 * p7 + 4 * p2 * p3 * p4 * p8 - 2 * p2 * p3 * p6 * p7 -
                         2 * p2 * p4 * p5 * p7 + p3 * p3 * p6 * p6 - 2 * p3 * p4 * p5 * p6 + p4 * p4 * p5 * p5;
    const double denominator = -2.0 * inner;
    const double numerator1 = 2 * p1 * p1 * p2 * p7 * p8 + 2 * p1 * p1 * p3 * p6 * p8 + 2 * p1 * p1 * p4 * p5 * p8 -
                              4 * p1 * p1 * p5 * p6 * p7 - p1 * p2 * p2 * p7 * p7 - 4 * p1 * p2 * p3 * p4 * p8 +
                              2 * p1 * p2 * p3 * p6 * p7 + 2 * p1 * p2 * p4 * p5 * p7 - p1 * p3 * p3 * p6 * p6 +
                              2 * p1 * p3 * p4 * p5 * p6 - p1 * p4 * p4 * p5 * p5 - p1 * p1 * p1 * p8 * p8;
    if (!(inner > 1e-13 * std::pow(p1, 4))) {
        throw Error(ErrorKind::DegenerateDenominator,
                    "the two components of the triple system coincide (denominator " + format_double(denominator) + ")");
    }
    const double linear = p1 * p1 * p8 - p1 * p2 * p7 - p1 * p3 * p6 - p1 * p4 * p5 + 2 * p2 * p3 * p4;
    const double numerator2 = linear * std::sqrt(inner);
    const double root_plus = (numerator1 + numerator2) / denominator;
    const double root_minus = (numerator1 - numerator2) / denominator;
    s.numerator1_gap = std::fabs(numerator1 - 0.5 * p1 * denominator) / std::max(std::fabs(numerator1), kTiny);

    // The two roots are a and b = p1 - a. The sign of the third central
    // moment of the triple tells which one belongs to the global-on state.
    const double mi = p2 / p1, mj = p3 / p1, mk = p4 / p1;
    const double kij = p5 / p1 - mi * mj;
    const double kik = p6 / p1 - mi * mk;
    const double kjk = p7 / p1 - mj * mk;
    const double k3 = p8 / p1 - mi * p7 / p1 - mj * p6 / p1 - mk * p5 / p1 + 2 * mi * mj * mk;
    const double kprod = kij * kik * kjk;
    if (!(kprod > 0.0)) {
        throw Error(ErrorKind::DegenerateDenominator, "pairwise covariances of the triple are not all positive");
    }
    const double a_moment = 0.5 * p1 * (1.0 - k3 / std::sqrt(4.0 * kprod + k3 * k3));
    const double a = std::fabs(root_plus - a_moment) <= std::fabs(root_minus - a_moment) ? root_plus : root_minus;
    s.moment_gap = std::fabs(a - a_moment);
    s.a = a;
    s.b = p1 - a;
    if (!(s.a > 0.0 && s.b > 0.0)) {
        throw Error(ErrorKind::DegenerateDenominator, "triple system has no root with both components positive");
    }
    const double cij = p1 * p5 - p2 * p3;
    const double cik = p1 * p6 - p2 * p4;
    const double cjk = p1 * p7 - p3 * p4;
    const double ab = s.a * s.b;
    const std::array<double, 3> d{std::sqrt(cij * cik / (cjk * ab)), std::sqrt(cij * cjk / (cik * ab)),
                                  std::sqrt(cik * cjk / (cij * ab))};
    const std::array<double, 3> m{p2, p3, p4};
    for (int t = 0; t < 3; ++t) {
        s.y[t] = (m[t] - s.a * d[t]) / p1;
        s.x[t] = s.y[t] + d[t];
    }
    return s;
}

MixedResult identify_mixed(const MarginalSource& dist, const CausalICModel& skeleton, const GlobalOptions& options) {
    if (classify(skeleton) != ModelClass::MixedGlobalMarkovian) {
        throw Error(ErrorKind::ClassMismatch, "skeleton is not a global-plus-private hidden model");
    }
    const auto layout = *mixed_layout(skeleton);
    const int n = static_cast<int>(skeleton.observed.size());
    if (dist.num_nodes() != n) throw Error(ErrorKind::InvalidArgument, "distribution and skeleton differ in node count");
    const bool lenient = dist.is_empirical() && !options.strict;

    MixedResult result;
    MixedParams& out = result.params;
    out.nodes = skeleton.observed;
    out.q0.assign(n, std::nullopt);
    out.q.assign(n, std::nullopt);
    auto clip = [&](double v, const std::string& what) { return clip_probability(v, what, out.warnings); };

    // Pick the first triple whose members all carry a global weight, seen
    // as strictly positive pairwise covariances.
    std::set<int> everyone;
    for (int t = 0; t < n; ++t) everyone.insert(t);
    const double floor = dist.is_empirical() && dist.sample_count() > 0
                             ? 5.0 / std::sqrt(static_cast<double>(dist.sample_count()))
                             : 1e-12;
    std::optional<DisconnectedTriple> chosen;
    for (const auto& t : disconnected_triples(skeleton, everyone)) {
        const auto p = triple_probs(dist, t.k + 1, t.i, t.j, t.k);
        const double scale = floor * p[0] * p[0];
        if (p[0] * p[4] - p[1] * p[2] > scale && p[0] * p[5] - p[1] * p[3] > scale &&
            p[0] * p[6] - p[2] * p[3] > scale) {
            chosen = t;
            break;
        }
    }
    if (!chosen) throw Error(ErrorKind::NoQualifyingTriple, "no disconnected triple with nonzero global weights");
    result.triple = *chosen;

    std::vector<int> order(n);
    for (int t = 0; t < n; ++t) order[t] = t;
    if (chosen->adjacent) order = consecutive_order(skeleton, *chosen);
    const CausalICModel work_model = reordered(skeleton, order);
    result.order = work_model.observed;
    const PermutedSource work(dist, order);
    const IndexedModel wim = index_model(work_model);
    std::vector<int> position(n);
    for (int w = 0; w < n; ++w) position[order[w]] = w;
    const int wi = position[chosen->i];
    const int wj = position[chosen->j];
    const int wk = position[chosen->k];

    // Working-order estimates; mapped back at the end.
    std::vector<Estimate> q(n), q0(n);
    std::map<std::pair<int, int>, Estimate> p;
    Estimate r0;

    // a[L] and b[L]: prefix of length L all zero with the global node on / off.
    std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
    for (int len = wk + 1; len <= n; ++len) {
        MixedSolverState s = solve_triple(triple_probs(work, len, wi, wj, wk));
        s.l = len;
        if (!(s.sign_product < 0.0)) out.warnings.push_back("sign lemma fails at prefix " + std::to_string(len));
        a[len] = s.a;
        b[len] = s.b;
        result.states.push_back(s);
    }
    for (int t = wk + 1; t < n; ++t) {
        const double stay = b[t + 1] / b[t];
        q[t] = clip(1.0 - stay, "q of " + work_model.observed[t]);
        q0[t] = clip(1.0 - a[t + 1] / a[t] / stay, "q0 of " + work_model.observed[t]);
    }

    if (chosen->adjacent) {
        // Joint over the first wk+1 nodes and the global node, one
        // two-component solve per assignment of the nodes before the triple.
        const int len = wk + 1;
        std::vector<std::array<double, 2>> joint(std::size_t{1} << len, {0.0, 0.0});
        for (std::uint64_t g = 0; g < (std::uint64_t{1} << wi); ++g) {
            PartialAssignment head;
            for (int t = 0; t < wi; ++t) head.set(t, (g >> t) & 1U);
            MixedSolverState s = solve_triple(triple_probs(work, len, wi, wj, wk, head));
            s.l = len;
            s.gamma = assignment_string(g, wi);
            for (int v = 0; v < 8; ++v) {
                double on = s.a;
                double off = s.b;
                for (int m = 0; m < 3; ++m) {
                    if ((v >> m) & 1) {
                        on *= s.x[m];
                        off *= s.y[m];
                    }
                }
                const std::uint64_t mask = g | (std::uint64_t((v >> 0) & 1) << wi) | (std::uint64_t((v >> 1) & 1) << wj) |
                                           (std::uint64_t((v >> 2) & 1) << wk);
                joint[mask] = {off, on};
            }
            result.states.push_back(s);
        }
        auto J = [&](const PartialAssignment& pa, int u) {
            CompensatedSum sum;
            for (std::uint64_t m = 0; m < joint.size(); ++m) {
                if ((m & pa.care) == (pa.value & pa.care)) sum.add(joint[m][u]);
            }
            return sum.value();
        };
        r0 = clip(J({}, 1), "r0");
        for (int t = 0; t <= wk; ++t) {
            PartialAssignment parents_zero;
            for (const auto& link : wim.observed_in[t]) parents_zero.set(link.node, false);
            auto stay_given = [&](PartialAssignment given, int u) -> std::optional<double> {
                const double den = J(given, u);
                if (den <= kTiny) return std::nullopt;
                given.set(t, false);
                return J(given, u) / den;
            };
            const auto off = stay_given(parents_zero, 0);
            const auto on = stay_given(parents_zero, 1);
            if (!off || !on || *off <= 0.0) continue;
            q[t] = clip(1.0 - *off, "q of " + work_model.observed[t]);
            q0[t] = clip(1.0 - *on / *off, "q0 of " + work_model.observed[t]);
            for (const auto& link : wim.observed_in[t]) {
                PartialAssignment one_hot = parents_zero;
                one_hot.set(link.node, true);
                const auto s = stay_given(one_hot, 0);
                if (s) p[{link.node, t}] = clip(1.0 - *s / *off, "p of " + edge_label(work_model.observed[link.node], work_model.observed[t]));
            }
        }
    }

    // Edges into nodes past the triple, from any node whose weights are known.
    for (int l = wk + 1; l < n; ++l) {
        for (const auto& link : wim.observed_in[l]) {
            const int t = link.node;
            if (!q[t] || !q0[t] || *q[t] >= 1.0 || *q0[t] >= 1.0) continue;
            const double stay = (1.0 - *q[t]) * (1.0 - *q0[t]);
            const double x = (1.0 - stay) / stay;
            const double y = *q[t] / (1.0 - *q[t]);
            auto surviving = [&](int len) -> std::optional<double> {
                const double den = a[len] * x + b[len] * y;
                if (den <= kTiny) return std::nullopt;
                return work.marginal(zeros_except(len, {t})) / den;
            };
            const auto upto = surviving(l + 1);
            const auto before = surviving(l);
            if (upto && before && *before > kTiny) {
                p[{t, l}] = clip(1.0 - *upto / *before, "p of " + edge_label(work_model.observed[t], work_model.observed[l]));
            }
        }
    }

    // Back to the skeleton's order.
    out.r0 = r0;
    if (!r0) out.unresolved.push_back("r0");
    for (int v = 0; v < n; ++v) {
        out.q0[v] = q0[position[v]];
        out.q[v] = q[position[v]];
        if (!out.q0[v]) out.unresolved.push_back("q0:" + skeleton.observed[v]);
        if (!out.q[v]) out.unresolved.push_back("q:" + skeleton.observed[v]);
    }
    for (const auto& e : skeleton.vv_edges) {
        const auto it = p.find({position[observed_index(skeleton, e.from)], position[observed_index(skeleton, e.to)]});
        EdgeEstimate est{e.from, e.to, it == p.end() ? Estimate{} : it->second};
        if (!est.value) out.unresolved.push_back(edge_label(e.from, e.to));
        out.p.push_back(std::move(est));
    }

    if (options.resimulate && out.unresolved.empty() && 2 * n + 1 <= SizeGuard{}.max_units) {
        const ObservedDistribution sim = exact_joint(with_mixed_params(skeleton, out, layout));
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
    return result;
}

MixedParams mixed_truth(const CausalICModel& model) {
    if (classify(model) != ModelClass::MixedGlobalMarkovian) {
        throw Error(ErrorKind::ClassMismatch, "model is not a global-plus-private hidden model");
    }
    const auto layout = *mixed_layout(model);
    const IndexedModel im = index_model(model);
    MixedParams out;
    out.nodes = model.observed;
    out.r0 = im.r[layout.global_hidden];
    out.q0.assign(im.num_observed, 0.0);
    out.q.assign(im.num_observed, 0.0);
    for (const auto& link : im.hidden_out[layout.global_hidden]) out.q0[link.node] = link.weight;
    for (int t = 0; t < im.num_observed; ++t) {
        const int u = layout.private_hidden[t];
        out.q[t] = im.r[u] * im.hidden_out[u][0].weight;
    }
    for (const auto& e : model.vv_edges) out.p.push_back({e.from, e.to, e.p});
    return out;
}

}  // namespace icid
