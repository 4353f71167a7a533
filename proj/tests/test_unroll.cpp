#include <catch_amalgamated.hpp>

#include <cmath>
#include <json.hpp>

#include "fixtures.hpp"
#include "icid/chain.hpp"
#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/generators.hpp"
#include "icid/unroll.hpp"
#include "oracles.hpp"

using namespace icid;

namespace {

// V1 -> V2 -> V3 -> V1 with U1 -> {V1, V2}.
CausalICModel figure_six(double v) {
    CausalICModel m;
    m.allow_cycles = true;
    m.observed = {"V1", "V2", "V3"};
    m.hidden = {{"U1", v}};
    m.vv_edges = {{"V1", "V2", v}, {"V2", "V3", v}, {"V3", "V1", v}};
    m.uv_edges = {{"U1", "V1", v}, {"U1", "V2", v}};
    return m;
}

}  // namespace

TEST_CASE("acyclic two-node model matches exact enumeration", "[unroll]") {
    const auto m = fixture::two_node_markovian(0.3, 0.6, 0.45);
    const auto d = unrolled_final_distribution(unroll(m, 2));
    CHECK(d.source() == DistributionSource::Unrolled);
    CHECK(linf_distance(d, exact_joint(m)) <= 1e-12);
}

TEST_CASE("figure-six network: layered shape and equivalence", "[unroll]") {
    const auto m = figure_six(0.5);
    const auto bn = unroll(m);
    CHECK(bn.horizon == 3);
    const auto doc = nlohmann::json::parse(unrolled_to_json(bn));
    CHECK(doc["nodes"].size() == 1 + 3 * 4);
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& e : doc["edges"]) edges.emplace(e[0].get<std::string>(), e[1].get<std::string>());
    for (int t = 1; t <= 3; ++t) {
        const auto at = [&](const char* v, int layer) { return std::string(v) + "@" + std::to_string(layer); };
        for (const char* v : {"V1", "V2", "V3"}) CHECK(edges.count({at(v, t - 1), at(v, t)}));
        CHECK(edges.count({at("V1", t - 1), at("V2", t)}));
        CHECK(edges.count({at("V2", t - 1), at("V3", t)}));
        CHECK(edges.count({at("V3", t - 1), at("V1", t)}));
        CHECK_FALSE(edges.count({at("V2", t - 1), at("V1", t)}));
    }
    CHECK(edges.count({"U1", "V1@1"}));
    CHECK(edges.count({"U1", "V2@1"}));
    CHECK_FALSE(edges.count({"U1", "V1@2"}));
    CHECK(edges.size() == 3 * 6 + 2);
    CHECK(check_unroll_equivalence(m) <= 1e-12);
    CHECK(check_unroll_equivalence(m, {"V1"}) <= 1e-12);
}

TEST_CASE("conditional tables are stochastic and absorbing", "[unroll]") {
    const auto doc = nlohmann::json::parse(unrolled_to_json(unroll(figure_six(0.37))));
    for (const auto& table : doc["tables"]) {
        for (const auto& row : table["rows"]) {
            const auto& p = row["p"];
            const double sum = p[0].get<double>() + p[1].get<double>() + p[2].get<double>();
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
            if (row["parents"][0].get<int>() != kIdle) CHECK(p[2].get<double>() == 1.0);
        }
    }
    const auto bn = unroll(figure_six(0.37));
    CHECK(unrolled_conditional(bn, 1, 2, kFresh, {kIdle}) == std::array<double, 3>{0.0, 0.0, 1.0});
    CHECK(unrolled_conditional(bn, 1, 2, kSpent, {kFresh}) == std::array<double, 3>{0.0, 0.0, 1.0});
    // Only freshly active parents try; spent ones already had their chance.
    CHECK(unrolled_conditional(bn, 1, 2, kIdle, {kSpent})[0] == 1.0);
    CHECK(unrolled_conditional(bn, 1, 2, kIdle, {kFresh})[1] == Catch::Approx(0.37).margin(1e-15));
    CHECK_THROWS_AS(unrolled_conditional(bn, 1, 1, kIdle, {kIdle}), Error);
}

TEST_CASE("deterministic propagation", "[unroll]") {
    CausalICModel cycle;
    cycle.allow_cycles = true;
    cycle.observed = {"V1", "V2", "V3"};
    cycle.vv_edges = {{"V1", "V2", 1.0}, {"V2", "V3", 1.0}, {"V3", "V1", 1.0}};
    const auto all = unrolled_final_distribution(unroll(cycle, 3), {"V1"});
    CHECK(all.probability("111") == 1.0);

    auto silent = figure_six(0.5);
    silent.hidden[0].r = 0.0;
    CHECK(unrolled_final_distribution(unroll(silent)).probability("000") == 1.0);

    CounterRng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = random_cyclic(rng, 4, 6, 1, {0.0, 1.0});
        for (auto& e : m.vv_edges) e.p = std::round(e.p);
        for (auto& e : m.uv_edges) e.q = std::round(e.q);
        for (auto& h : m.hidden) h.r = std::round(h.r);
        const auto d = unrolled_final_distribution(unroll(m), {"V2"});
        const auto want = oracle::full_joint(m, {"V2"}).observed();
        CHECK(linf_distance(d, want) == 0.0);
        CHECK(*std::max_element(d.probabilities().begin(), d.probabilities().end()) == 1.0);
    }
}

TEST_CASE("random cyclic models match the live-edge oracle", "[unroll]") {
    CounterRng rng(62);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 3;
        const auto m = random_cyclic(rng, n, std::min(8, n * (n - 1)), trial % 2, {0.05, 0.95});
        INFO("trial " << trial);
        CHECK(check_unroll_equivalence(m) <= 1e-12);
        CHECK(check_unroll_equivalence(m, {m.observed.back()}) <= 1e-12);
        CHECK(linf_distance(unrolled_final_distribution(unroll(m)), oracle::full_joint(m).observed()) <= 1e-12);
    }
}

TEST_CASE("every DAG model is reproduced at the default horizon", "[unroll]") {
    CounterRng rng(63);
    for (int trial = 0; trial < 15; ++trial) {
        const auto m = random_dag(rng, 2 + trial % 4, 1 + trial % 2, 6, 5, {0.1, 0.9});
        CHECK(check_unroll_equivalence(m) <= 1e-12);
    }
}

TEST_CASE("a short horizon misses late activations", "[unroll]") {
    const auto chain = chain_model(ChainParams::uniform(3, 0.5));
    CHECK(check_unroll_equivalence(chain, {}, 1) > 1e-3);
    CHECK(check_unroll_equivalence(chain, {}, 3) <= 1e-12);
    try {
        (void)unroll(chain, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
    }
}
