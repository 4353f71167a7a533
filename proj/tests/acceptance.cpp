// Acceptance checks AC1-AC9. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "icid/chain.hpp"
#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/generators.hpp"
#include "icid/global.hpp"
#include "icid/markovian.hpp"
#include "icid/unroll.hpp"
#include "oracles.hpp"

using namespace icid;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* title, const std::function<Verdict()>& body) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("unexpected exception: ") + e.what()};
    }
    std::printf("%s %s: %s (%s; %.2f s)\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += !v.pass;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::map<std::string, double> markovian_estimates(const MarkovianParams& m) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (m.q[i]) out["q:" + m.nodes[i]] = *m.q[i];
    }
    for (const auto& e : m.p) {
        if (e.value) out["p:" + e.from + "->" + e.to] = *e.value;
    }
    return out;
}

// Missing estimates count as an infinite error.
double gap_over(const std::map<std::string, double>& got, const std::map<std::string, double>& want) {
    double gap = 0.0;
    for (const auto& [key, value] : want) {
        const auto it = got.find(key);
        gap = std::max(gap, it == got.end() ? INFINITY : std::fabs(it->second - value));
    }
    return gap;
}

Verdict ac1() {
    CounterRng rng(1001);
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (int k = 0; k < 100; ++k) {
        const auto m = random_markovian(rng, 1 + static_cast<int>(rng.below(10)), 3, {0.05, 0.95});
        worst = std::max(worst, gap_over(markovian_estimates(identify_markovian(exact_joint(m), m)),
                                         oracle::markovian_parameters(m)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 10.0, "100 models, worst L-inf " + fmt("%.3g", worst) + ", " + fmt("%.2f s", secs)};
}

Verdict ac2() {
    CounterRng rng(1002);
    int checked = 0;
    bool ok = true;
    for (int k = 0; k < 30; ++k) {
        auto m = random_markovian(rng, 3 + static_cast<int>(rng.below(5)), 3, {0.05, 0.95});
        // Force q = 1 on one node with parents.
        std::vector<std::string> with_parents;
        for (const auto& e : m.vv_edges) with_parents.push_back(e.to);
        if (with_parents.empty()) continue;
        const std::string target = with_parents[rng.below(with_parents.size())];
        for (auto& e : m.uv_edges) {
            if (e.to == target) {
                e.q = 1.0;
                m.hidden[static_cast<std::size_t>(hidden_index(m, e.from))].r = 1.0;
            }
        }
        const auto est = identify_markovian(exact_joint(m), m);
        const int t = observed_index(m, target);
        ok = ok && est.q[t] && *est.q[t] == 1.0;
        for (const auto& e : est.p) {
            if (e.to != target) continue;
            const bool listed = std::find(est.unidentifiable.begin(), est.unidentifiable.end(),
                                          edge_label(e.from, e.to)) != est.unidentifiable.end();
            ok = ok && !e.value && listed;
        }
        ++checked;
    }
    return {ok && checked >= 20, std::to_string(checked) + " models with a forced q = 1"};
}

Verdict ac3() {
    bool ok = true;
    double worst_gap = 0.0;
    double smallest_param_gap = INFINITY;
    const auto t0 = Clock::now();
    for (double r2 : {0.30, 0.40, 0.55, 0.60}) {
        const auto pair = witness_pair(r2);
        const auto check = verify_witness(pair, 1e-9);
        // Independent bare comparison through the brute-force oracle.
        const double bare = linf_distance(oracle::full_joint(witness_model(pair.base)).observed(),
                                          oracle::full_joint(witness_model(pair.alt)).observed());
        worst_gap = std::max({worst_gap, check.max_gap, bare});
        smallest_param_gap = std::min(smallest_param_gap, check.param_gap);
        ok = ok && check.agrees && bare <= 1e-9 && check.param_gap >= 0.01;
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 1.0, "max distribution gap " + fmt("%.3g", worst_gap) + ", min parameter gap " +
                                  fmt("%.3g", smallest_param_gap)};
}

Verdict ac4() {
    CounterRng rng(1004);
    double worst = 0.0;
    double slowest = 0.0;
    int errors = 0;
    for (int n = 3; n <= 8; ++n) {
        for (int k = 0; k < 50; ++k) {
            const auto truth = random_chain(rng, n, {0.1, 0.9});
            const auto dist = exact_joint(chain_model(truth));
            for (auto kind : {PriorKnowledge::Kind::Q2, PriorKnowledge::Kind::R}) {
                const auto t0 = Clock::now();
                try {
                    const auto result = identify_chain(dist, n, prior_from(truth, kind));
                    worst = std::max(worst, max_abs_difference(result.params, truth));
                } catch (const Error&) {
                    ++errors;
                }
                slowest = std::max(slowest, seconds_since(t0));
            }
        }
    }
    return {worst <= 1e-6 && slowest < 1.0 && errors == 0,
            "600 solves, worst L-inf " + fmt("%.3g", worst) + ", errors " + std::to_string(errors) + ", slowest " +
                fmt("%.3f s", slowest)};
}

Verdict ac5() {
    bool ok = true;
    for (int n = 2; n <= 20; ++n) ok = ok && min_known_bound(n) == static_cast<int>(std::floor((n - 1) / 2.0));
    return {ok, "n = 2..20"};
}

Verdict ac6() {
    CounterRng rng(1006);
    double worst = 0.0;
    int cases[3] = {0, 0, 0};
    int bad_open = 0;
    for (int k = 0; k < 100; ++k) {
        const int n = 3 + static_cast<int>(rng.below(6));
        const auto m = random_global(rng, n, rng.uniform(0.1, 0.9), 0.2, {0.1, 0.9});
        const auto dist = exact_joint(m);
        const auto est = identify_global(dist, m);
        ++cases[est.algorithm_case];
        worst = std::max(worst, max_abs_difference(est, global_truth(m)));
        // An edge may stay open only when its source can never be active.
        for (const auto& e : est.p) {
            if (!e.value && dist.marginal(PartialAssignment().set(observed_index(m, e.from), true)) > 1e-12) ++bad_open;
        }
        if (!est.r) bad_open += 1;
    }
    return {worst <= 1e-8 && cases[1] > 0 && cases[2] > 0 && bad_open == 0,
            "worst L-inf " + fmt("%.3g", worst) + ", case 1: " + std::to_string(cases[1]) +
                ", case 2: " + std::to_string(cases[2]) + ", wrongly open: " + std::to_string(bad_open)};
}

// Sign product for a triple from the eight marginals with every other node
// up to k held at zero.
double sign_product(const MarginalSource& d, const DisconnectedTriple& t) {
    auto q = [&](int bits) {
        PartialAssignment pa;
        for (int v = 0; v <= t.k; ++v) pa.set(v, false);
        pa.set(t.i, bits & 1).set(t.j, bits & 2).set(t.k, bits & 4);
        return d.marginal(pa);
    };
    const double p1 = q(0), p2 = q(1), p3 = q(2), p4 = q(4), p5 = q(3), p6 = q(5), p7 = q(6);
    return (p2 * p3 - p1 * p5) * (p2 * p4 - p1 * p6) * (p3 * p4 - p1 * p7);
}

// Each factor divided by the magnitude of its two terms, so the product is
// compared against rounding noise rather than against the raw scale.
double relative_sign_product(const MarginalSource& d, const DisconnectedTriple& t) {
    auto q = [&](int bits) {
        PartialAssignment pa;
        for (int v = 0; v <= t.k; ++v) pa.set(v, false);
        pa.set(t.i, bits & 1).set(t.j, bits & 2).set(t.k, bits & 4);
        return d.marginal(pa);
    };
    const double p1 = q(0), p2 = q(1), p3 = q(2), p4 = q(4), p5 = q(3), p6 = q(5), p7 = q(6);
    auto rel = [](double x, double y) { return (x - y) / (std::fabs(x) + std::fabs(y)); };
    return rel(p2 * p3, p1 * p5) * rel(p2 * p4, p1 * p6) * rel(p3 * p4, p1 * p7);
}

Verdict ac7() {
    CounterRng rng(1007);
    double worst_full = 0.0;
    double worst_tail = 0.0;
    double weakest_sign = -INFINITY;
    double weakest_scaled = -INFINITY;
    bool ok = true;
    for (int k = 0; k < 50; ++k) {
        const auto m = random_mixed_adjacent(rng, 3 + static_cast<int>(rng.below(4)), 0.4, {0.1, 0.9});
        const auto dist = exact_joint(m);
        const auto res = identify_mixed(dist, m);
        ok = ok && res.triple.adjacent && res.params.unresolved.empty();
        worst_full = std::max(worst_full, max_abs_difference(res.params, mixed_truth(m)));
        weakest_sign = std::max(weakest_sign, sign_product(dist, res.triple));
        weakest_scaled = std::max(weakest_scaled, relative_sign_product(dist, res.triple));
    }
    for (int k = 0; k < 20; ++k) {
        const int n = 5 + static_cast<int>(rng.below(2));
        const auto m = random_mixed_spread(rng, n, {0.1, 0.9});
        const auto dist = exact_joint(m);
        const auto res = identify_mixed(dist, m);
        const auto truth = mixed_truth(m);
        const auto& p = res.params;
        const int kk = res.triple.k;
        ok = ok && !res.triple.adjacent && !p.r0;
        for (int t = 0; t < n; ++t) {
            const bool tail = t > kk;
            ok = ok && p.q[t].has_value() == tail && p.q0[t].has_value() == tail;
            if (tail) {
                worst_tail = std::max({worst_tail, std::fabs(*p.q[t] - *truth.q[t]), std::fabs(*p.q0[t] - *truth.q0[t])});
            }
        }
        for (std::size_t e = 0; e < p.p.size(); ++e) {
            const bool tail = observed_index(m, p.p[e].from) > kk;
            ok = ok && p.p[e].value.has_value() == tail;
            if (tail) worst_tail = std::max(worst_tail, std::fabs(*p.p[e].value - *truth.p[e].value));
            if (!tail) {
                ok = ok && std::find(p.unresolved.begin(), p.unresolved.end(), edge_label(p.p[e].from, p.p[e].to)) !=
                               p.unresolved.end();
            }
        }
        weakest_sign = std::max(weakest_sign, sign_product(dist, res.triple));
        weakest_scaled = std::max(weakest_scaled, relative_sign_product(dist, res.triple));
    }
    ok = ok && worst_full <= 1e-6 && worst_tail <= 1e-6 && weakest_sign < 0.0 && weakest_scaled < -1e-12;
    return {ok, "adjacent worst L-inf " + fmt("%.3g", worst_full) + ", split-triple tail worst " +
                    fmt("%.3g", worst_tail) + ", largest sign product " + fmt("%.3g", weakest_sign) +
                    " (relative: " + fmt("%.3g", weakest_scaled) + ")"};
}

Verdict ac8() {
    CounterRng rng(1008);
    double worst_dag = 0.0;
    double worst_cyclic = 0.0;
    const auto t0 = Clock::now();
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + static_cast<int>(rng.below(5));
        const auto m = random_dag(rng, n, 1 + static_cast<int>(rng.below(4)), 10, 8, {0.05, 0.95});
        worst_dag = std::max(worst_dag, linf_distance(exact_joint(m), live_edge_exact(m)));
    }
    for (int k = 0; k < 20; ++k) {
        const int n = 2 + static_cast<int>(rng.below(3));
        const auto m = random_cyclic(rng, n, std::min(8, n * (n - 1)), static_cast<int>(rng.below(2)), {0.05, 0.95});
        worst_cyclic = std::max(worst_cyclic, check_unroll_equivalence(m));
    }
    const double secs = seconds_since(t0);
    return {worst_dag <= 1e-12 && worst_cyclic <= 1e-12 && secs < 30.0,
            "200 DAGs worst " + fmt("%.3g", worst_dag) + ", 20 cyclic worst " + fmt("%.3g", worst_cyclic)};
}

Verdict ac9() {
    CounterRng rng(1009);
    std::vector<double> errors;
    for (int k = 0; k < 10; ++k) {
        const auto m = random_markovian(rng, 2 + static_cast<int>(rng.below(4)), 3, {0.1, 0.9});
        const auto dist = empirical_distribution(m, 1'000'000, 2024 + static_cast<std::uint64_t>(k));
        errors.push_back(gap_over(markovian_estimates(identify_markovian(dist, m)), oracle::markovian_parameters(m)));
    }
    std::sort(errors.begin(), errors.end());
    const double median = (errors[4] + errors[5]) / 2.0;
    return {median <= 0.1, "median L-inf " + fmt("%.4f", median) + " over 10 models (target 0.02, asserted 0.1)"};
}

}  // namespace

int main() {
    report("AC1", "Markovian round trip", ac1);
    report("AC2", "Markovian q = 1 corner case", ac2);
    report("AC3", "unidentifiability witness", ac3);
    report("AC4", "chain identification, both priors", ac4);
    report("AC5", "known-parameter bound", ac5);
    report("AC6", "global hidden variable", ac6);
    report("AC7", "mixed model and sign lemma", ac7);
    report("AC8", "oracle coherence", ac8);
    report("AC9", "sampling sanity", ac9);
    return failures == 0 ? 0 : 1;
}
