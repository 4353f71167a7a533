#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/generators.hpp"
#include "icid/markovian.hpp"
#include "oracles.hpp"

using namespace icid;
using Catch::Approx;

namespace {

std::map<std::string, double> resolved(const MarkovianParams& m) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (m.q[i]) out["q:" + m.nodes[i]] = *m.q[i];
    }
    for (const auto& e : m.p) {
        if (e.value) out["p:" + e.from + "->" + e.to] = *e.value;
    }
    return out;
}

double worst_gap(const std::map<std::string, double>& got, const std::map<std::string, double>& want) {
    double gap = 0.0;
    for (const auto& [key, value] : want) {
        const auto it = got.find(key);
        if (it == got.end()) return INFINITY;
        gap = std::max(gap, std::fabs(it->second - value));
    }
    return gap;
}

}  // namespace

TEST_CASE("root rule on a single node", "[markovian]") {
    CausalICModel m;
    m.observed = {"V1"};
    m.hidden = {{"U1", 1.0}};
    m.uv_edges = {{"U1", "V1", 0.5}};
    const auto est = identify_markovian(exact_joint(m), m);
    REQUIRE(est.q[0]);
    CHECK(*est.q[0] == Approx(0.5).margin(1e-15));
}

TEST_CASE("two-node round trip", "[markovian]") {
    const auto m = fixture::two_node_markovian(0.3, 0.2, 0.5);
    const auto est = identify_markovian(exact_joint(m), m);
    CHECK(worst_gap(resolved(est), oracle::markovian_parameters(m)) <= 1e-9);
    CHECK(est.unidentifiable.empty());
}

TEST_CASE("q equal to one leaves incoming p unidentifiable", "[markovian]") {
    const auto m = fixture::two_node_markovian(0.3, 1.0, 0.5);
    const auto est = identify_markovian(exact_joint(m), m);
    REQUIRE(est.q[1]);
    CHECK(*est.q[1] == 1.0);
    REQUIRE(est.p.size() == 1);
    CHECK_FALSE(est.p[0].value);
    CHECK(est.unidentifiable == std::vector<std::string>{"V1->V2"});
}

TEST_CASE("random Markovian models round-trip", "[markovian]") {
    CounterRng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto m = random_markovian(rng, 1 + trial % 8, 3, {0.05, 0.95});
        const auto est = identify_markovian(exact_joint(m), m);
        INFO("trial " << trial);
        CHECK(worst_gap(resolved(est), oracle::markovian_parameters(m)) <= 1e-9);
        CHECK(est.warnings.empty());
    }
}

TEST_CASE("q does not change when extra non-descendants are conditioned to zero", "[markovian]") {
    CounterRng rng(32);
    for (int trial = 0; trial < 15; ++trial) {
        const auto m = random_markovian(rng, 6, 2, {0.1, 0.9});
        const auto dist = exact_joint(m);
        const auto est = identify_markovian(dist, m);
        const auto reach = observed_reachability(m);
        for (int i = 0; i < 6; ++i) {
            PartialAssignment given;
            for (int j = 0; j < 6; ++j) {
                if (j != i && !reach[i][j]) given.set(j, false);
            }
            const double q = 1.0 - conditional(dist, PartialAssignment().set(i, false), given);
            CHECK(q == Approx(*est.q[i]).margin(1e-9));
        }
    }
}

TEST_CASE("query count stays linear in edges plus nodes", "[markovian]") {
    CounterRng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_markovian(rng, 9, 3, {0.1, 0.9});
        const auto dist = exact_joint(m);
        const oracle::CountingSource counting(dist);
        (void)identify_markovian(counting, m);
        const std::size_t budget = 2 * (m.observed.size() + m.vv_edges.size());
        CHECK(counting.distinct() <= budget);
    }
}

TEST_CASE("zero-probability conditioning: lenient marks, strict throws", "[markovian]") {
    // V1 is always active, so P(V1 = 0) = 0 and V2's baseline is unobservable.
    const auto m = fixture::two_node_markovian(1.0, 0.3, 0.5);
    const auto dist = exact_joint(m);
    const auto est = identify_markovian(dist, m);
    CHECK(*est.q[0] == 1.0);
    CHECK_FALSE(est.q[1]);
    CHECK(std::find(est.unidentifiable.begin(), est.unidentifiable.end(), "V2") != est.unidentifiable.end());
    try {
        (void)identify_markovian(dist, m, MarkovianOptions{true});
        FAIL("expected ZeroConditioningEvent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroConditioningEvent);
    }
}

TEST_CASE("non-Markovian skeleton is a class mismatch", "[markovian]") {
    const auto m = fixture::witness_graph();
    try {
        (void)identify_markovian(exact_joint(m), m);
        FAIL("expected ClassMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ClassMismatch);
    }
}

TEST_CASE("clipping warns only beyond the tolerance", "[markovian]") {
    std::vector<std::string> warnings;
    CHECK(clip_probability(1.0 + 5e-8, "x", warnings) == 1.0);
    CHECK(warnings.empty());
    CHECK(clip_probability(-0.01, "x", warnings) == 0.0);
    CHECK(warnings.size() == 1);
}

TEST_CASE("empirical inputs recover parameters approximately", "[markovian]") {
    CounterRng rng(34);
    const auto m = random_markovian(rng, 4, 2, {0.1, 0.9});
    const auto est = identify_markovian(empirical_distribution(m, 200'000, 9), m);
    CHECK(worst_gap(resolved(est), oracle::markovian_parameters(m)) <= 0.05);
}
