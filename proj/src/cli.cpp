#include "icid/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "icid/bench.hpp"
#include "icid/error.hpp"
#include "icid/exact.hpp"
#include "icid/serialization.hpp"
#include "icid/unroll.hpp"

namespace icid {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Writes to `path`, or to `out` when the path is empty.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::Io, "cannot write file: " + path);
    file << text;
}

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> names;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    return names;
}

struct DistArgs {
    std::string model;
    std::string mode = "exact";
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    std::string seeds;
    int max_units = 24;
    std::string output;
};

struct IdentifyArgs {
    std::string model;
    std::string cls = "auto";
    std::string dist = "exact";
    std::string input;
    std::string known;
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    bool strict = false;
};

struct WitnessArgs {
    double r2 = 0.4;
    bool verify = false;
    double tol = 1e-9;
};

struct UnrollArgs {
    std::string model;
    int horizon = 0;
    bool check = false;
    std::string seeds;
    std::string output;
};

struct BenchArgs {
    std::string config;
    std::string output;
};

int cmd_validate(const std::string& path, std::ostream& out) {
    // parse_model rejects invalid models, so reaching the report means ok.
    const CausalICModel model = parse_model(read_file(path));
    ordered_json doc;
    doc["ok"] = validate(model).ok();
    doc["class"] = to_string(classify(model));
    doc["observed"] = model.observed.size();
    doc["hidden"] = model.hidden.size();
    doc["edges"] = model.vv_edges.size() + model.uv_edges.size();
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_dist(const DistArgs& a, std::ostream& out) {
    const CausalICModel model = load_model(a.model);
    const auto seeds = split_names(a.seeds);
    const SizeGuard guard{a.max_units};
    std::optional<ObservedDistribution> dist;
    if (a.mode == "exact") {
        if (!seeds.empty()) throw Error(ErrorKind::InvalidArgument, "seeds are supported by live-edge mode only");
        dist = exact_joint(model, guard);
    } else if (a.mode == "live-edge") {
        dist = live_edge_exact(model, seeds, guard);
    } else {
        if (!seeds.empty()) throw Error(ErrorKind::InvalidArgument, "seeds are supported by live-edge mode only");
        dist = empirical_distribution(model, a.samples, a.seed);
    }
    std::ostringstream csv;
    write_csv(csv, *dist);
    emit(a.output, out, csv.str());
    return 0;
}

ObservedDistribution input_distribution(const IdentifyArgs& a, const CausalICModel& model, bool samples_given) {
    if (!a.input.empty()) {
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot open distribution file: " + a.input);
        ObservedDistribution read = read_csv(in, model.observed);
        if (!samples_given) return read;
        return ObservedDistribution(model.observed, read.probabilities(), DistributionSource::Empirical, a.samples);
    }
    if (a.dist == "sample") return empirical_distribution(model, a.samples, a.seed);
    return exact_joint(model);
}

int cmd_identify(const IdentifyArgs& a, bool samples_given, std::ostream& out) {
    const CausalICModel model = load_model(a.model);
    std::string cls = a.cls;
    if (cls == "auto") {
        switch (classify(model)) {
            case ModelClass::Markovian: cls = "markovian"; break;
            case ModelClass::SemiMarkovianChain: cls = "chain"; break;
            case ModelClass::GlobalHidden: cls = "global"; break;
            case ModelClass::MixedGlobalMarkovian: cls = "mixed"; break;
            case ModelClass::General:
                throw Error(ErrorKind::ClassMismatch, "model belongs to no identifiable class");
        }
    }
    const ObservedDistribution dist = input_distribution(a, model, samples_given);
    if (cls == "markovian") {
        out << result_json(identify_markovian(dist, model, MarkovianOptions{a.strict}));
    } else if (cls == "chain") {
        if (!chain_layout(model)) throw Error(ErrorKind::ClassMismatch, "model is not a confounded chain");
        if (a.known.empty()) throw Error(ErrorKind::InvalidArgument, "chain identification needs --known");
        const PriorKnowledge prior = parse_prior(read_file(a.known));
        ChainOptions options;
        options.strict = a.strict;
        out << result_json(identify_chain(dist, static_cast<int>(model.observed.size()), prior, options));
    } else if (cls == "global") {
        out << result_json(identify_global(dist, model, GlobalOptions{a.strict, true}));
    } else {
        out << result_json(identify_mixed(dist, model, GlobalOptions{a.strict, true}));
    }
    return 0;
}

int cmd_witness(const WitnessArgs& a, std::ostream& out, std::ostream& err) {
    const WitnessPair pair = witness_pair(a.r2);
    if (!a.verify) {
        out << witness_json(pair, nullptr);
        return 0;
    }
    const WitnessCheck check = verify_witness(pair, a.tol);
    out << witness_json(pair, &check);
    if (!check.agrees) {
        err << error_json("WitnessMismatch", "observed distributions differ by " + format_double(check.max_gap)) << '\n';
        return 1;
    }
    return 0;
}

int cmd_unroll(const UnrollArgs& a, std::ostream& out) {
    const CausalICModel model = load_model(a.model);
    const std::optional<int> horizon = a.horizon == 0 ? std::nullopt : std::optional<int>(a.horizon);
    const UnrolledBN bn = unroll(model, horizon);
    if (!a.check) {
        emit(a.output, out, unrolled_to_json(bn));
        return 0;
    }
    const double gap = check_unroll_equivalence(model, split_names(a.seeds), horizon);
    ordered_json doc;
    doc["horizon"] = bn.horizon;
    doc["seeds"] = split_names(a.seeds);
    doc["max_gap"] = gap;
    emit(a.output, out, doc.dump(2) + "\n");
    return 0;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    BenchConfig config = parse_bench_config(read_file(a.config));
    if (!a.output.empty()) config.output = a.output;
    const BenchReport report = roundtrip_benchmark(config);
    std::ostringstream csv;
    write_bench_csv(csv, report);
    emit(config.output, out, csv.str());
    if (!config.output.empty()) {
        ordered_json doc;
        doc["instances"] = report.rows.size();
        doc["failures"] = report.failures();
        doc["output"] = config.output;
        out << doc.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Identification tools for independent-cascade models with hidden confounders", "icid"};
    app.require_subcommand(1, 1);

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a model file and report its class");
    validate_cmd->add_option("model", validate_path, "Model JSON file")->required();

    DistArgs dist;
    auto* dist_cmd = app.add_subcommand("dist", "Write the observed distribution as CSV");
    dist_cmd->add_option("model", dist.model, "Model JSON file")->required();
    dist_cmd->add_option("--mode", dist.mode, "exact, live-edge or sample")
        ->check(CLI::IsMember({"exact", "live-edge", "sample"}));
    dist_cmd->add_option("--samples", dist.samples, "Cascades to draw in sample mode")->check(CLI::PositiveNumber);
    dist_cmd->add_option("--seed", dist.seed, "RNG seed for sample mode");
    dist_cmd->add_option("--seeds", dist.seeds, "Comma-separated seed nodes (live-edge mode)");
    dist_cmd->add_option("--max-units", dist.max_units, "Enumeration size guard")->check(CLI::PositiveNumber);
    dist_cmd->add_option("--output,-o", dist.output, "Output file (default: standard output)");

    IdentifyArgs ident;
    auto* ident_cmd = app.add_subcommand("identify", "Recover model parameters from the observed distribution");
    ident_cmd->add_option("model", ident.model, "Model JSON file (parameters used only to build the distribution)")
        ->required();
    ident_cmd->add_option("--class", ident.cls, "auto, markovian, chain, global or mixed")
        ->check(CLI::IsMember({"auto", "markovian", "chain", "global", "mixed"}));
    ident_cmd->add_option("--dist", ident.dist, "exact or sample")->check(CLI::IsMember({"exact", "sample"}));
    ident_cmd->add_option("--input", ident.input, "Distribution CSV to use instead of the model's");
    auto* samples_opt = ident_cmd->add_option("--samples", ident.samples, "Sample count (sample mode or --input)")
                            ->check(CLI::PositiveNumber);
    ident_cmd->add_option("--seed", ident.seed, "RNG seed for sample mode");
    ident_cmd->add_option("--known", ident.known, "Chain prior-knowledge JSON file");
    ident_cmd->add_flag("--strict", ident.strict, "Turn consistency warnings into errors");

    WitnessArgs wit;
    auto* wit_cmd = app.add_subcommand("witness", "Print two chain parameter sets with the same distribution");
    wit_cmd->add_option("--r2", wit.r2, "Activation probability of U2")->required();
    wit_cmd->add_flag("--verify", wit.verify, "Compare the exact distributions");
    wit_cmd->add_option("--tol", wit.tol, "Agreement tolerance for --verify");

    UnrollArgs unr;
    auto* unroll_cmd = app.add_subcommand("unroll", "Build the time-unrolled three-state network");
    unroll_cmd->add_option("model", unr.model, "Model JSON file (cycles allowed)")->required();
    unroll_cmd->add_option("--horizon", unr.horizon, "Number of layers after layer 0 (default: n)")
        ->check(CLI::PositiveNumber);
    unroll_cmd->add_flag("--check", unr.check, "Compare against live-edge enumeration");
    unroll_cmd->add_option("--seeds", unr.seeds, "Comma-separated seed nodes");
    unroll_cmd->add_option("--output,-o", unr.output, "Output file (default: standard output)");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Round-trip benchmark on random instances");
    bench_cmd->add_option("config", bench.config, "Benchmark JSON config")->required();
    bench_cmd->add_option("--output,-o", bench.output, "CSV report path (overrides the config)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
        return 2;
    }

    try {
        if (*validate_cmd) return cmd_validate(validate_path, out);
        if (*dist_cmd) return cmd_dist(dist, out);
        if (*ident_cmd) return cmd_identify(ident, samples_opt->count() > 0, out);
        if (*wit_cmd) return cmd_witness(wit, out, err);
        if (*unroll_cmd) return cmd_unroll(unr, out);
        return cmd_bench(bench, out);
    } catch (const Error& e) {
        err << error_json(to_string(e.kind()), e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << error_json("InternalError", e.what()) << '\n';
        return 1;
    }
}

}  // namespace icid
