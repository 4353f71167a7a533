#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icid/distribution.hpp"
#include "icid/model.hpp"

namespace icid {

/// A recovered value, or nullopt when the distribution does not determine it.
using Estimate = std::optional<double>;

struct EdgeEstimate {
    std::string from;
    std::string to;
    Estimate value;
};

/// q[i] is the probability that node i is switched on by its private hidden
/// parent (r times the edge's q; 0 without a hidden parent).
struct MarkovianParams {
    std::vector<std::string> nodes;
    std::vector<Estimate> q;
    std::vector<EdgeEstimate> p;
    std::vector<std::string> unidentifiable;
    std::vector<std::string> warnings;
};

struct MarkovianOptions {
    /// Fail on a zero-probability conditioning event instead of marking the
    /// affected parameters unidentifiable.
    bool strict = false;
    double one_threshold = 1e-9;
};

[[nodiscard]] MarkovianParams identify_markovian(const MarginalSource& dist, const CausalICModel& skeleton,
                                                 const MarkovianOptions& options = {});

/// The parameters identify_markovian should recover for `model`.
[[nodiscard]] MarkovianParams markovian_truth(const CausalICModel& model);

/// Largest |a-b| over parameters that both sides resolved; throws
/// InvalidArgument when the two sets describe different skeletons.
[[nodiscard]] double max_abs_difference(const MarkovianParams& a, const MarkovianParams& b);

/// Clips a value into [0,1], reporting in `warnings` when the excess was
/// larger than 1e-7.
[[nodiscard]] double clip_probability(double v, const std::string& what, std::vector<std::string>& warnings);

}  // namespace icid
