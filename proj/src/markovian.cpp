#include "icid/markovian.hpp"

#include <algorithm>
#include <cmath>

#include "icid/error.hpp"

namespace icid {

namespace {

constexpr double kZeroEvent = 1e-300;

// P(V_node = 0 | given), or nullopt when P(given) is zero.
std::optional<double> stay_probability(const MarginalSource& dist, int node, const PartialAssignment& given) {
    const double denom = dist.marginal(given);
    if (denom <= kZeroEvent) return std::nullopt;
    PartialAssignment joint = given;
    joint.set(node, false);
    return dist.marginal(joint) / denom;
}

void check_shape(const MarginalSource& dist, const CausalICModel& skeleton) {
    if (!is_markovian(skeleton)) throw Error(ErrorKind::ClassMismatch, "skeleton is not Markovian");
    if (dist.num_nodes() != static_cast<int>(skeleton.observed.size())) {
        throw Error(ErrorKind::InvalidArgument, "distribution and skeleton differ in node count");
    }
}

}  // namespace

double clip_probability(double v, const std::string& what, std::vector<std::string>& warnings) {
    const double c = std::clamp(v, 0.0, 1.0);
    if (std::fabs(c - v) > 1e-7) {
        warnings.push_back("clipped " + what + " from " + format_double(v) + " into [0,1]");
    }
    return c;
}

MarkovianParams identify_markovian(const MarginalSource& dist, const CausalICModel& skeleton,
                                   const MarkovianOptions& options) {
    check_shape(dist, skeleton);
    const IndexedModel im = index_model(skeleton);
    MarkovianParams out;
    out.nodes = skeleton.observed;
    out.q.assign(im.num_observed, std::nullopt);
    int recovered = 0;

    auto zero_event = [&](const std::string& what) {
        if (options.strict) {
            throw Error(ErrorKind::ZeroConditioningEvent, "conditioning event for " + what + " has zero probability");
        }
        out.unidentifiable.push_back(what);
    };

    for (int i = 0; i < im.num_observed; ++i) {
        const std::string& name = skeleton.observed[i];
        const auto& parents = im.observed_in[i];
        PartialAssignment all_zero;
        for (const auto& link : parents) all_zero.set(link.node, false);

        const auto stay = stay_probability(dist, i, all_zero);
        std::optional<double> q;
        if (stay) {
            q = clip_probability(1.0 - *stay, "q of " + name, out.warnings);
            out.q[i] = q;
            ++recovered;
        } else {
            zero_event(name);
        }

        for (const auto& link : parents) {
            EdgeEstimate e{skeleton.observed[link.node], name, std::nullopt};
            const std::string label = edge_label(e.from, e.to);
            if (!q) {
                out.unidentifiable.push_back(label);
            } else if (*q >= 1.0 - options.one_threshold) {
                // With q = 1 the child is always active, so p leaves no trace.
                out.q[i] = 1.0;
                out.unidentifiable.push_back(label);
            } else {
                PartialAssignment one_hot = all_zero;
                one_hot.set(link.node, true);
                const auto s = stay_probability(dist, i, one_hot);
                if (s) {
                    e.value = clip_probability(1.0 - *s / (1.0 - *q), "p of " + label, out.warnings);
                    ++recovered;
                } else {
                    zero_event(label);
                }
            }
            out.p.push_back(std::move(e));
        }
    }
    if (recovered == 0) {
        throw Error(ErrorKind::ZeroConditioningEvent, "no parameter could be recovered");
    }
    return out;
}

MarkovianParams markovian_truth(const CausalICModel& model) {
    if (!is_markovian(model)) throw Error(ErrorKind::ClassMismatch, "model is not Markovian");
    const IndexedModel im = index_model(model);
    MarkovianParams out;
    out.nodes = model.observed;
    out.q.assign(im.num_observed, 0.0);
    for (int i = 0; i < im.num_observed; ++i) {
        for (const auto& link : im.hidden_in[i]) out.q[i] = im.r[link.node] * link.weight;
        const bool saturated = *out.q[i] >= 1.0 - 1e-9;
        for (const auto& link : im.observed_in[i]) {
            EdgeEstimate e{model.observed[link.node], model.observed[i], link.weight};
            if (saturated) {
                e.value.reset();
                out.unidentifiable.push_back(edge_label(e.from, e.to));
            }
            out.p.push_back(std::move(e));
        }
    }
    return out;
}

double max_abs_difference(const MarkovianParams& a, const MarkovianParams& b) {
    if (a.nodes != b.nodes || a.p.size() != b.p.size()) {
        throw Error(ErrorKind::InvalidArgument, "parameter sets describe different skeletons");
    }
    double gap = 0.0;
    for (std::size_t i = 0; i < a.q.size(); ++i) {
        if (a.q[i] && b.q[i]) gap = std::max(gap, std::fabs(*a.q[i] - *b.q[i]));
    }
    for (std::size_t k = 0; k < a.p.size(); ++k) {
        if (a.p[k].from != b.p[k].from || a.p[k].to != b.p[k].to) {
            throw Error(ErrorKind::InvalidArgument, "parameter sets list edges in different orders");
        }
        if (a.p[k].value && b.p[k].value) gap = std::max(gap, std::fabs(*a.p[k].value - *b.p[k].value));
    }
    return gap;
}

}  // namespace icid
