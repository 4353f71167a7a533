#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "icid/generators.hpp"

namespace icid {

enum class BenchClass { Markovian, Chain, Global, Mixed };

[[nodiscard]] std::string_view to_string(BenchClass cls);

struct BenchConfig {
    BenchClass model_class = BenchClass::Markovian;
    int n_min = 3;
    int n_max = 6;
    ParamRange params{0.1, 0.9};
    int instances = 10;
    bool sampled = false;
    std::uint64_t samples = 0;  // N, required when sampled
    std::uint64_t seed = 1;
    std::string output;         // empty: caller decides
    PriorKnowledge::Kind chain_prior = PriorKnowledge::Kind::Q2;
};

/// JSON, e.g. {"class": "chain", "n": [3, 8], "params": [0.1, 0.9],
/// "instances": 50, "mode": "sampled", "samples": 1000000, "seed": 7,
/// "prior": "r", "output": "report.csv"}.
[[nodiscard]] BenchConfig parse_bench_config(std::string_view text);

struct BenchRow {
    int instance = 0;
    int n = 0;
    double linf_error = 0.0;
    double l2_error = 0.0;
    std::string status;  // "ok" or the error kind
    double ms_generate = 0.0;
    double ms_distribution = 0.0;
    double ms_solve = 0.0;

    [[nodiscard]] double ms_total() const { return ms_generate + ms_distribution + ms_solve; }
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;

    [[nodiscard]] int failures() const;
};

/// Instance k draws everything from CounterRng::stream_seed(seed, k), so a
/// report is reproducible apart from its timing column. Per-instance errors
/// are recorded, never thrown.
[[nodiscard]] BenchReport roundtrip_benchmark(const BenchConfig& config);

/// Columns: instance,class,n,mode,linf_error,l2_error,status,ms_total.
void write_bench_csv(std::ostream& out, const BenchReport& report);

}  // namespace icid
