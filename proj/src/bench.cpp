#include "icid/bench.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <map>
#include <ostream>

#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/global.hpp"
#include "icid/markovian.hpp"

namespace icid {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using ParamMap = std::map<std::string, double>;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void put_nodes(ParamMap& out, std::string_view prefix, const std::vector<std::string>& nodes,
               const std::vector<Estimate>& values) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (values[i]) out[std::string(prefix) + ":" + nodes[i]] = *values[i];
    }
}

void put_edges(ParamMap& out, const std::vector<EdgeEstimate>& edges) {
    for (const auto& e : edges) {
        if (e.value) out["p:" + edge_label(e.from, e.to)] = *e.value;
    }
}

ParamMap flatten(const MarkovianParams& m) {
    ParamMap out;
    put_nodes(out, "q", m.nodes, m.q);
    put_edges(out, m.p);
    return out;
}

ParamMap flatten(const ChainParams& c) {
    ParamMap out;
    const auto put = [&](std::string_view name, const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out[std::string(name) + std::to_string(i + 1)] = v[i];
    };
    put("p", c.p);
    put("r", c.r);
    put("q1_", c.q1);
    put("q2_", c.q2);
    return out;
}

ParamMap flatten(const GlobalParams& g) {
    ParamMap out;
    if (g.r) out["r"] = *g.r;
    put_nodes(out, "q", g.nodes, g.q);
    put_edges(out, g.p);
    return out;
}

ParamMap flatten(const MixedParams& m) {
    ParamMap out;
    if (m.r0) out["r0"] = *m.r0;
    put_nodes(out, "q0", m.nodes, m.q0);
    put_nodes(out, "q", m.nodes, m.q);
    put_edges(out, m.p);
    return out;
}

// Errors over every truth entry; a parameter the solver left open counts as
// a failure rather than silently shrinking the comparison.
void score(const ParamMap& estimate, const ParamMap& truth, BenchRow& row) {
    double linf = 0.0;
    double sq = 0.0;
    for (const auto& [key, value] : truth) {
        const auto it = estimate.find(key);
        if (it == estimate.end()) {
            row.status = "unresolved";
            continue;
        }
        const double d = std::fabs(it->second - value);
        linf = std::max(linf, d);
        sq += d * d;
    }
    row.linf_error = linf;
    row.l2_error = std::sqrt(sq);
}

BenchClass parse_class(const std::string& s) {
    if (s == "markovian") return BenchClass::Markovian;
    if (s == "chain") return BenchClass::Chain;
    if (s == "global") return BenchClass::Global;
    if (s == "mixed") return BenchClass::Mixed;
    throw Error(ErrorKind::Parse, "unknown bench class: " + s);
}

int minimum_n(BenchClass cls) {
    switch (cls) {
        case BenchClass::Markovian: return 1;
        case BenchClass::Chain: return 2;
        case BenchClass::Global:
        case BenchClass::Mixed: return 3;
    }
    return 1;
}

void run_instance(const BenchConfig& config, int k, BenchRow& row) {
    CounterRng rng(CounterRng::stream_seed(config.seed, static_cast<std::uint64_t>(k)));
    const int span = config.n_max - config.n_min + 1;
    row.n = config.n_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    const std::uint64_t sample_seed = rng.next_u64();

    auto t0 = Clock::now();
    CausalICModel model;
    ChainParams chain_truth;
    switch (config.model_class) {
        case BenchClass::Markovian: model = random_markovian(rng, row.n, 3, config.params); break;
        case BenchClass::Chain:
            chain_truth = random_chain(rng, row.n, config.params);
            model = chain_model(chain_truth);
            break;
        case BenchClass::Global: model = random_global(rng, row.n, 0.5, 0.2, config.params); break;
        case BenchClass::Mixed: model = random_mixed_adjacent(rng, row.n, 0.4, config.params); break;
    }
    row.ms_generate = elapsed_ms(t0);

    t0 = Clock::now();
    const ObservedDistribution dist =
        config.sampled ? empirical_distribution(model, config.samples, sample_seed) : exact_joint(model);
    row.ms_distribution = elapsed_ms(t0);

    t0 = Clock::now();
    row.status = "ok";
    switch (config.model_class) {
        case BenchClass::Markovian: {
            const auto est = identify_markovian(dist, model);
            row.ms_solve = elapsed_ms(t0);
            score(flatten(est), flatten(markovian_truth(model)), row);
            break;
        }
        case BenchClass::Chain: {
            const auto est = identify_chain(dist, row.n, prior_from(chain_truth, config.chain_prior));
            row.ms_solve = elapsed_ms(t0);
            score(flatten(est.params), flatten(chain_truth), row);
            break;
        }
        case BenchClass::Global: {
            const auto est = identify_global(dist, model);
            row.ms_solve = elapsed_ms(t0);
            // Edges out of never-active nodes are legitimately open.
            ParamMap truth = flatten(global_truth(model));
            for (const auto& label : est.unidentifiable) truth.erase("p:" + label);
            score(flatten(est), truth, row);
            break;
        }
        case BenchClass::Mixed: {
            const auto est = identify_mixed(dist, model);
            row.ms_solve = elapsed_ms(t0);
            score(flatten(est.params), flatten(mixed_truth(model)), row);
            break;
        }
    }
}

}  // namespace

std::string_view to_string(BenchClass cls) {
    switch (cls) {
        case BenchClass::Markovian: return "markovian";
        case BenchClass::Chain: return "chain";
        case BenchClass::Global: return "global";
        case BenchClass::Mixed: return "mixed";
    }
    return "markovian";
}

BenchConfig parse_bench_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string("bench config: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::Parse, "bench config must be a JSON object");
    BenchConfig c;
    try {
        c.model_class = parse_class(doc.at("class").get<std::string>());
        if (doc.contains("n")) {
            const auto& n = doc["n"];
            if (n.is_number_integer()) {
                c.n_min = c.n_max = n.get<int>();
            } else {
                c.n_min = n.at(0).get<int>();
                c.n_max = n.at(1).get<int>();
            }
        }
        if (doc.contains("params")) c.params = {doc["params"].at(0).get<double>(), doc["params"].at(1).get<double>()};
        c.instances = doc.value("instances", c.instances);
        const std::string mode = doc.value("mode", std::string("exact"));
        if (mode != "exact" && mode != "sampled") throw Error(ErrorKind::Parse, "mode must be exact or sampled");
        c.sampled = mode == "sampled";
        c.samples = doc.value("samples", std::uint64_t{0});
        c.seed = doc.value("seed", c.seed);
        c.output = doc.value("output", std::string());
        const std::string prior = doc.value("prior", std::string("q2"));
        if (prior != "q2" && prior != "r") throw Error(ErrorKind::Parse, "prior must be q2 or r");
        c.chain_prior = prior == "q2" ? PriorKnowledge::Kind::Q2 : PriorKnowledge::Kind::R;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("bench config: ") + e.what());
    }
    if (c.n_min < minimum_n(c.model_class) || c.n_max < c.n_min) {
        throw Error(ErrorKind::InvalidArgument, "bench n range is empty or too small for the class");
    }
    if (!(c.params.lo >= 0.0 && c.params.lo <= c.params.hi && c.params.hi <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "bench parameter range must satisfy 0 <= lo <= hi <= 1");
    }
    if (c.instances < 0) throw Error(ErrorKind::InvalidArgument, "instance count must be nonnegative");
    if (c.sampled && c.samples < 1) throw Error(ErrorKind::InvalidArgument, "sampled mode needs samples >= 1");
    return c;
}

int BenchReport::failures() const {
    int count = 0;
    for (const auto& row : rows) count += row.status != "ok";
    return count;
}

BenchReport roundtrip_benchmark(const BenchConfig& config) {
    BenchReport report;
    report.config = config;
    report.rows.resize(static_cast<std::size_t>(std::max(config.instances, 0)));
    for (int k = 0; k < config.instances; ++k) {
        BenchRow& row = report.rows[static_cast<std::size_t>(k)];
        row.instance = k;
        try {
            run_instance(config, k, row);
        } catch (const Error& e) {
            row.status = std::string(to_string(e.kind()));
            row.linf_error = row.l2_error = std::nan("");
        }
    }
    return report;
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
    const std::string cls(to_string(report.config.model_class));
    const std::string mode = report.config.sampled ? "sampled" : "exact";
    out << "instance,class,n,mode,linf_error,l2_error,status,ms_total\n";
    for (const auto& row : report.rows) {
        out << row.instance << ',' << cls << ',' << row.n << ',' << mode << ',' << format_double(row.linf_error) << ','
            << format_double(row.l2_error) << ',' << row.status << ',' << format_double(row.ms_total()) << '\n';
    }
}

}  // namespace icid
