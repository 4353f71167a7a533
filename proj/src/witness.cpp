#include <algorithm>
#include <array>
#include <cmath>

#include "icid/chain.hpp"
#include "icid/error.hpp"
#include "icid/exact.hpp"

namespace icid {

namespace {

CausalICModel with_surrogates(CausalICModel model, const std::array<double, 3>& activation) {
    for (int k = 0; k < 3; ++k) {
        const std::string name = "E" + std::to_string(k + 1);
        model.hidden.push_back({name, activation[k]});
        model.uv_edges.push_back({name, model.observed[k], 1.0});
    }
    return model;
}

}  // namespace

std::vector<double> WitnessParams::values() const { return {p12, p23, r1, r2, q11, q12, q21, q22}; }

WitnessPair witness_pair(double r2) {
    if (!(r2 > 0.25 && r2 < 9.0 / 14.0)) {
        throw Error(ErrorKind::InvalidArgument, "r2 must lie strictly between 1/4 and 9/14");
    }
    WitnessPair pair;
    pair.r2 = r2;
    WitnessParams& alt = pair.alt;
    alt.r2 = r2;
    alt.r1 = (10.0 * r2 - 7.0) / (12.0 * r2 - 10.0);
    alt.q11 = 1.0 / (4.0 * alt.r1);
    alt.q12 = (6.0 * r2 - 5.0) / (8.0 * r2 - 8.0);
    alt.q21 = 1.0 / (3.0 - 2.0 * r2);
    alt.q22 = 1.0 / (4.0 * r2);
    for (double v : alt.values()) {
        if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::InvalidArgument, "witness parameter left (0,1)");
    }
    return pair;
}

CausalICModel witness_model(const WitnessParams& w) {
    CausalICModel m;
    m.observed = {"V1", "V2", "V3"};
    m.hidden = {{"U1", w.r1}, {"U2", w.r2}};
    m.vv_edges = {{"V1", "V2", w.p12}, {"V2", "V3", w.p23}};
    m.uv_edges = {{"U1", "V1", w.q11}, {"U1", "V2", w.q12}, {"U2", "V2", w.q21}, {"U2", "V3", w.q22}};
    return m;
}

WitnessCheck verify_witness(const WitnessPair& pair, double tol) {
    WitnessCheck out;
    const auto base_values = pair.base.values();
    const auto alt_values = pair.alt.values();
    for (std::size_t i = 0; i < base_values.size(); ++i) {
        out.param_gap = std::max(out.param_gap, std::fabs(base_values[i] - alt_values[i]));
    }
    const CausalICModel base = witness_model(pair.base);
    const CausalICModel alt = witness_model(pair.alt);
    auto compare = [&](const CausalICModel& a, const CausalICModel& b) {
        out.max_gap = std::max(out.max_gap, linf_distance(exact_joint(a), exact_joint(b)));
        ++out.settings;
    };
    compare(base, alt);
    constexpr std::array<double, 4> grid{0.0, 0.25, 0.5, 1.0};
    for (double s1 : grid) {
        for (double s2 : grid) {
            for (double s3 : grid) {
                compare(with_surrogates(base, {s1, s2, s3}), with_surrogates(alt, {s1, s2, s3}));
            }
        }
    }
    out.agrees = out.max_gap <= tol;
    return out;
}

std::optional<Theorem2Structure> find_theorem2_structure(const CausalICModel& model) {
    const IndexedModel im = index_model(model);
    const auto reach = observed_reachability(model);
    const int n = im.num_observed;

    auto hidden_spanning = [&](int x, int y) -> std::optional<int> {
        for (int u = 0; u < im.num_hidden; ++u) {
            const auto& out = im.hidden_out[u];
            if (out.size() != 2) continue;
            const bool hits_x = out[0].node == x || out[1].node == x;
            const bool hits_y = out[0].node == y || out[1].node == y;
            if (hits_x && hits_y) return u;
        }
        return std::nullopt;
    };
    auto has_edge = [&](int from, int to) {
        return std::any_of(im.observed_out[from].begin(), im.observed_out[from].end(),
                           [&](const WeightedLink& l) { return l.node == to; });
    };

    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (b == a || !has_edge(a, b)) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b || !has_edge(b, c)) continue;
                const auto ux = hidden_spanning(a, b);
                const auto uy = hidden_spanning(b, c);
                if (!ux || !uy || *ux == *uy) continue;
                bool squeezed = false;
                for (int z = 0; z < n && !squeezed; ++z) {
                    if (z != b && z != a && z != c) squeezed = reach[a][z] && reach[z][c];
                }
                if (squeezed) continue;
                return Theorem2Structure{model.observed[a], model.observed[b], model.observed[c],
                                         model.hidden[*ux].name, model.hidden[*uy].name};
            }
        }
    }
    return std::nullopt;
}

}  // namespace icid
