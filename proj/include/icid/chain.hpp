#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icid/distribution.hpp"
#include "icid/model.hpp"

namespace icid {

/// Parameters of the confounded chain V1 -> ... -> Vn. Entry t-1 of each
/// vector belongs to position t: p[t-1] is the weight of Vt -> Vt+1, and
/// hidden node Ut has activation r[t-1] with edges q1[t-1] into Vt and
/// q2[t-1] into Vt+1.
struct ChainParams {
    int n = 0;
    std::vector<double> p;
    std::vector<double> r;
    std::vector<double> q1;
    std::vector<double> q2;

    [[nodiscard]] static ChainParams uniform(int n, double value);
    bool operator==(const ChainParams&) const = default;
};

/// p1 plus either the whole q2 sequence or the whole r sequence.
struct PriorKnowledge {
    enum class Kind { Q2, R };

    double p1 = 0.0;
    Kind kind = Kind::Q2;
    std::vector<double> values;
};

struct AbcTriple {
    std::string gamma;
    double a = 0.0;  // P(V1..Vt = gamma)
    double b = 0.0;  // P(V1..Vt = gamma, Ut = 0)
    double c = 0.0;  // P(V1..Vt = gamma, Ut = 1)
};

struct CoPair {
    std::string beta;
    double co1 = 0.0;
    double co2 = 0.0;
};

[[nodiscard]] CausalICModel chain_model(const ChainParams& params);
[[nodiscard]] ChainParams chain_params_of(const CausalICModel& model);
[[nodiscard]] double max_abs_difference(const ChainParams& a, const ChainParams& b);

/// Reads a from the distribution and runs the b/c recurrence along gamma's
/// prefixes. Needs r and q1 up to position |gamma| (when |gamma| < n) and p,
/// q2 up to |gamma|-1. Throws InconsistentPrior when a and b+c disagree by
/// more than 1e-8 at any prefix.
[[nodiscard]] AbcTriple chain_abc(const MarginalSource& dist, const ChainParams& known, std::string_view gamma);

/// Coefficients of the linear relation a^{beta 1 0} = C * (Co1 (x-1) + Co2 (y-1))
/// with x = r_{t-1} q_{t-1,2}, y = q_{t-1,2}, t = |beta| + 2.
[[nodiscard]] CoPair co_coefficients(const MarginalSource& dist, const ChainParams& known, std::string_view beta);

struct ChainOptions {
    bool strict = false;
    bool resimulate = true;
    double resimulation_tolerance = 1e-8;
};

struct ChainResult {
    ChainParams params;
    std::vector<std::string> warnings;
    std::optional<double> resimulation_gap;  // empty when the instance is too big to re-simulate
};

[[nodiscard]] ChainResult identify_chain(const MarginalSource& dist, int n, const PriorKnowledge& prior,
                                         const ChainOptions& options = {});

[[nodiscard]] PriorKnowledge prior_from(const ChainParams& truth, PriorKnowledge::Kind kind);

/// Number of known parameters at or below which the chain stays unidentifiable.
[[nodiscard]] int min_known_bound(int n);

// Unidentifiability witness on V1 -> V2 -> V3 with U1 -> {V1, V2} and
// U2 -> {V2, V3}.

struct WitnessParams {
    double p12 = 0.5;
    double p23 = 0.5;
    double r1 = 0.5;
    double r2 = 0.5;
    double q11 = 0.5;  // U1 -> V1
    double q12 = 0.5;  // U1 -> V2
    double q21 = 0.5;  // U2 -> V2
    double q22 = 0.5;  // U2 -> V3

    [[nodiscard]] std::vector<double> values() const;
};

struct WitnessPair {
    WitnessParams base;
    WitnessParams alt;
    double r2 = 0.5;
};

struct WitnessCheck {
    bool agrees = false;
    double max_gap = 0.0;    // largest atom difference over every surrogate setting
    double param_gap = 0.0;  // L-infinity distance between the two parameter sets
    int settings = 0;        // number of distributions compared
};

[[nodiscard]] WitnessPair witness_pair(double r2);
[[nodiscard]] CausalICModel witness_model(const WitnessParams& params);

/// Compares exact distributions of both parameter sets, both bare and with
/// extra always-on-capable root parents of V1, V2, V3 whose activation
/// probabilities range over {0, 0.25, 0.5, 1}.
[[nodiscard]] WitnessCheck verify_witness(const WitnessPair& pair, double tol);

struct Theorem2Structure {
    std::string a, b, c;
    std::string ux, uy;
};

[[nodiscard]] std::optional<Theorem2Structure> find_theorem2_structure(const CausalICModel& model);

}  // namespace icid
