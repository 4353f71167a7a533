#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "icid/error.hpp"
#include "icid/generators.hpp"
#include "icid/model.hpp"
#include "oracles.hpp"

using namespace icid;

namespace {

CausalICModel markovian_five() {
    CausalICModel m;
    m.observed = {"V1", "V2", "V3", "V4", "V5"};
    for (int i = 1; i <= 5; ++i) {
        const std::string u = "U" + std::to_string(i);
        m.hidden.push_back({u, 0.5});
        m.uv_edges.push_back({u, "V" + std::to_string(i), 0.5});
    }
    m.vv_edges = {{"V1", "V2", 0.5}, {"V1", "V3", 0.5}, {"V2", "V4", 0.5}, {"V3", "V4", 0.5}, {"V4", "V5", 0.5}};
    return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("minimal model parses", "[model]") {
    const auto m = parse_model(R"({"observed":["V1"],"hidden":[{"name":"U1","r":1.0}],
        "vv_edges":[],"uv_edges":[{"from":"U1","to":"V1","q":0.5}]})");
    CHECK(m.observed.size() == 1);
    CHECK(m.hidden.size() == 1);
    CHECK_FALSE(m.allow_cycles);
}

TEST_CASE("two-cycle is rejected with a cycle message", "[model]") {
    const char* text = R"({"observed":["V1","V2"],"hidden":[],
        "vv_edges":[{"from":"V1","to":"V2","p":0.5},{"from":"V2","to":"V1","p":0.5}],"uv_edges":[]})";
    try {
        (void)parse_model(text);
        FAIL("expected a parse failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidModel);
        CHECK(std::string(e.what()).find("cycle detected") != std::string::npos);
    }
}

TEST_CASE("witness graph has six edges and validates", "[model]") {
    const auto m = fixture::witness_graph();
    CHECK(m.vv_edges.size() + m.uv_edges.size() == 6);
    CHECK(validate(m).ok());
    CHECK(topological_order(m) == std::vector<std::string>{"V1", "V2", "V3"});
}

TEST_CASE("syntax errors report a position", "[model]") {
    try {
        (void)parse_model(R"({"observed": ["V1",)");
        FAIL("expected a parse failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("validate flags single invariant breaks", "[model]") {
    auto m = fixture::witness_graph();
    m.vv_edges[0].p = 1.3;
    auto report = validate(m);
    CHECK_FALSE(report.ok());
    CHECK(report.has_rule("probability_out_of_range"));
    CHECK(report.violations.front().message == "probability out of range");

    m = fixture::witness_graph();
    m.uv_edges.push_back({"U1", "U2", 0.5});
    report = validate(m);
    CHECK(report.has_rule("hidden_has_parent"));
}

TEST_CASE("validate rejects every invariant-breaking mutation of random models", "[model]") {
    CounterRng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const CausalICModel base = random_dag(rng, 3 + trial % 4, 1 + trial % 3, 5, 6, {0.1, 0.9});
        REQUIRE(validate(base).ok());
        std::vector<std::pair<std::string, CausalICModel>> mutants;
        auto m = base;
        m.hidden[0].r = -0.01;
        mutants.emplace_back("probability_out_of_range", m);
        m = base;
        m.uv_edges[0].q = 1.0000001;
        mutants.emplace_back("probability_out_of_range", m);
        m = base;
        m.hidden.push_back({m.observed[0], 0.5});
        mutants.emplace_back("duplicate_name", m);
        m = base;
        m.uv_edges.push_back({"nowhere", m.observed[0], 0.5});
        mutants.emplace_back("unknown_node", m);
        m = base;
        m.uv_edges.push_back({m.hidden[0].name, m.hidden[0].name, 0.5});
        mutants.emplace_back("hidden_has_parent", m);
        m = base;
        m.vv_edges.push_back({m.observed.back(), m.observed.front(), 0.5});
        // Closes a cycle when a forward path already exists.
        mutants.emplace_back(observed_reachability(base)[0][base.observed.size() - 1] ? "cycle_detected" : "order_violation", m);
        m = base;
        m.vv_edges.push_back({m.observed[0], m.observed[0], 0.5});
        mutants.emplace_back("self_loop", m);
        if (!base.vv_edges.empty()) {
            m = base;
            m.vv_edges.push_back(base.vv_edges[0]);
            mutants.emplace_back("duplicate_edge", m);
        }
        for (const auto& [rule, mutant] : mutants) {
            INFO("rule " << rule << " trial " << trial);
            CHECK(validate(mutant).has_rule(rule));
        }
    }
}

TEST_CASE("backward edge closing a cycle is reported as a cycle", "[model]") {
    auto m = fixture::witness_graph();
    m.vv_edges.push_back({"V3", "V1", 0.5});
    CHECK(validate(m).has_rule("cycle_detected"));
    m.allow_cycles = true;
    CHECK(validate(m).ok());
}

TEST_CASE("classify recognises the figure shapes", "[model]") {
    CHECK(classify(markovian_five()) == ModelClass::Markovian);
    CHECK(classify(fixture::witness_graph()) == ModelClass::SemiMarkovianChain);
    const auto mixed = fixture::mixed_model(4, 0.5, {0.5, 0.5, 0.5, 0.5}, {0.5, 0.5, 0.5, 0.5}, {{"V1", "V3", 0.5}});
    CHECK(classify(mixed) == ModelClass::MixedGlobalMarkovian);
    const auto global = fixture::global_model(3, 0.5, {0.5, 0.5, 0.5}, {});
    CHECK(classify(global) == ModelClass::GlobalHidden);
    auto general = fixture::witness_graph();
    general.hidden.push_back({"U3", 0.5});
    general.uv_edges.push_back({"U3", "V1", 0.5});
    general.uv_edges.push_back({"U3", "V3", 0.5});
    CHECK(classify(general) == ModelClass::General);
}

TEST_CASE("classify is stable under order-preserving renaming", "[model]") {
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        CausalICModel m = random_markovian(rng, 4, 2, {0.1, 0.9});
        if (trial % 2) m = random_global(rng, 4, 0.4, 0.0, {0.1, 0.9});
        const ModelClass before = classify(m);
        auto renamed = m;
        const auto rename = [](std::string s) { return "node_" + s + "_x"; };
        for (auto& v : renamed.observed) v = rename(v);
        for (auto& h : renamed.hidden) h.name = rename(h.name);
        for (auto& e : renamed.vv_edges) e = {rename(e.from), rename(e.to), e.p};
        for (auto& e : renamed.uv_edges) e = {rename(e.from), rename(e.to), e.q};
        CHECK(classify(renamed) == before);
    }
}

TEST_CASE("parse(serialize(m)) reproduces random models", "[model]") {
    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const CausalICModel m = trial % 5 == 4 ? random_cyclic(rng, 4, 6, 2, {0.0, 1.0})
                                               : random_dag(rng, 2 + trial % 6, trial % 4, 8, 6, {0.0, 1.0});
        CHECK(parse_model(serialize_model(m)) == m);
    }
}

TEST_CASE("stored order must be topological; reported orders agree with the oracle", "[model]") {
    auto m = fixture::witness_graph();
    const auto orders = oracle::topological_orders(m);
    REQUIRE(orders.size() == 1);
    CHECK(orders.front() == topological_order(m));
    CausalICModel single;
    single.observed = {"V1"};
    CHECK(topological_order(single) == std::vector<std::string>{"V1"});
    std::swap(m.observed[0], m.observed[2]);
    CHECK(kind_of([&] { (void)topological_order(m); }) == ErrorKind::InvalidModel);
}
