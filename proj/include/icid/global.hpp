#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icid/distribution.hpp"
#include "icid/markovian.hpp"
#include "icid/model.hpp"

namespace icid {

/// Single hidden node U0 with an edge into every observed node.
struct GlobalParams {
    std::vector<std::string> nodes;
    Estimate r;
    std::vector<Estimate> q;
    std::vector<EdgeEstimate> p;
    std::vector<std::string> unidentifiable;
    std::vector<std::string> warnings;
    int algorithm_case = 0;               // 1: unconnected pair, 2: connected triple
    std::vector<int> pivots;              // observed indices the solve anchored on
    std::optional<double> resimulation_gap;
};

/// Global hidden node plus one private hidden parent per observed node.
/// q[t] is the private parent's effective weight (its r times its q).
struct MixedParams {
    std::vector<std::string> nodes;
    Estimate r0;
    std::vector<Estimate> q0;
    std::vector<Estimate> q;
    std::vector<EdgeEstimate> p;
    std::vector<std::string> unresolved;
    std::vector<std::string> warnings;
    std::optional<double> resimulation_gap;
};

/// Quantities of one closed-form solve over a pivot triple. Index 0 of the
/// probability array is p1 = P(prefix all zero); then the three one-hot, the
/// three two-hot (ij, ik, jk) and the all-three pattern.
struct MixedSolverState {
    int l = 0;                    // prefix length (number of leading nodes constrained)
    std::string gamma;            // assignment of the nodes before the triple, adjacent solves only
    std::array<double, 8> probs{};
    double a = 0.0;
    double b = 0.0;
    std::array<double, 3> x{};
    std::array<double, 3> y{};
    double sign_product = 0.0;    // (p2p3-p1p5)(p2p4-p1p6)(p3p4-p1p7)
    double numerator1_gap = 0.0;  // |numerator1 - p1 * denominator / 2|, relative
    double moment_gap = 0.0;      // |a - a from the central-moment form|
};

struct DisconnectedTriple {
    int i = 0, j = 0, k = 0;
    bool adjacent = false;
};

struct GlobalOptions {
    bool strict = false;
    bool resimulate = true;
};

/// Indices t with P(V1..V{t-1} = 0, Vt = 1) above the threshold: 1e-12 for
/// exact inputs, 5/sqrt(N) for empirical ones.
[[nodiscard]] std::set<int> detect_nonzero_q(const MarginalSource& dist, int n);

[[nodiscard]] GlobalParams identify_global(const MarginalSource& dist, const CausalICModel& skeleton,
                                           const GlobalOptions& options = {});

/// All pairwise-disconnected triples drawn from `allowed`, the ones that can
/// sit consecutively in a topological order first, each group in
/// lexicographic order.
[[nodiscard]] std::vector<DisconnectedTriple> disconnected_triples(const CausalICModel& model,
                                                                   const std::set<int>& allowed);
[[nodiscard]] std::optional<DisconnectedTriple> find_disconnected_triple(const CausalICModel& model,
                                                                         const std::set<int>& allowed);

struct MixedResult {
    MixedParams params;
    DisconnectedTriple triple;
    std::vector<std::string> order;  // node order the solve worked in
    std::vector<MixedSolverState> states;
};

[[nodiscard]] MixedResult identify_mixed(const MarginalSource& dist, const CausalICModel& skeleton,
                                         const GlobalOptions& options = {});

/// Solves the two-component system behind a triple from its eight
/// probabilities. Throws DegenerateDenominator when the components coincide.
[[nodiscard]] MixedSolverState solve_triple(const std::array<double, 8>& probs);

[[nodiscard]] GlobalParams global_truth(const CausalICModel& model);
[[nodiscard]] MixedParams mixed_truth(const CausalICModel& model);

/// Largest |a-b| over entries both sides resolved.
[[nodiscard]] double max_abs_difference(const GlobalParams& a, const GlobalParams& b);
[[nodiscard]] double max_abs_difference(const MixedParams& a, const MixedParams& b);

}  // namespace icid
