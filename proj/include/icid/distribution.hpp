#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace icid {

/// Largest observed-node count a dense distribution table may hold.
inline constexpr int kMaxDenseNodes = 26;

/// Assignment to a subset of observed nodes: bit i of `care` marks node i as
/// assigned and bit i of `value` holds its state.
struct PartialAssignment {
    std::uint64_t care = 0;
    std::uint64_t value = 0;

    PartialAssignment& set(int node, bool bit);
    [[nodiscard]] bool assigned(int node) const noexcept { return (care >> node) & 1U; }
    [[nodiscard]] bool state(int node) const noexcept { return (value >> node) & 1U; }

    /// Assigns nodes 0..bits.size()-1 from a '0'/'1' string.
    [[nodiscard]] static PartialAssignment prefix(std::string_view bits);
    [[nodiscard]] static PartialAssignment full(std::uint64_t mask, int num_nodes);

    /// Union of two assignments; nullopt when they disagree on a shared node.
    [[nodiscard]] std::optional<PartialAssignment> merged(const PartialAssignment& other) const;

    bool operator==(const PartialAssignment&) const = default;
};

[[nodiscard]] PartialAssignment named_partial(const std::vector<std::string>& nodes,
                                              const std::map<std::string, int>& states);

enum class DistributionSource { Exact, LiveEdge, Empirical, Unrolled };

[[nodiscard]] std::string_view to_string(DistributionSource source);

/// Anything that answers marginal queries over observed-node assignments.
/// Identification routines consume this interface so that callers can
/// audit which probabilities an algorithm reads.
class MarginalSource {
public:
    virtual ~MarginalSource() = default;

    [[nodiscard]] virtual int num_nodes() const = 0;
    [[nodiscard]] virtual double marginal(const PartialAssignment& partial) const = 0;
    [[nodiscard]] virtual DistributionSource source() const = 0;
    [[nodiscard]] virtual std::uint64_t sample_count() const { return 0; }

    [[nodiscard]] bool is_empirical() const { return source() == DistributionSource::Empirical; }
};

/// Dense probability table over all 2^n full assignments.
class ObservedDistribution final : public MarginalSource {
public:
    ObservedDistribution(std::vector<std::string> nodes, std::vector<double> probabilities,
                         DistributionSource source, std::uint64_t samples = 0);

    [[nodiscard]] int num_nodes() const override { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] double marginal(const PartialAssignment& partial) const override;
    [[nodiscard]] DistributionSource source() const override { return source_; }
    [[nodiscard]] std::uint64_t sample_count() const override { return samples_; }

    [[nodiscard]] const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<double>& probabilities() const noexcept { return probs_; }
    [[nodiscard]] double probability(std::uint64_t mask) const { return probs_.at(mask); }
    [[nodiscard]] double probability(std::string_view bits) const;
    [[nodiscard]] double total_mass() const;

private:
    std::vector<std::string> nodes_;
    std::vector<double> probs_;
    DistributionSource source_;
    std::uint64_t samples_;
};

/// Neumaier's compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

[[nodiscard]] double marginal(const MarginalSource& dist, const PartialAssignment& partial);

/// P(target | given). Throws ZeroConditioningEvent when P(given) <= 1e-300.
[[nodiscard]] double conditional(const MarginalSource& dist, const PartialAssignment& target,
                                 const PartialAssignment& given);

/// Character i is the state of node i.
[[nodiscard]] std::string assignment_string(std::uint64_t mask, int num_nodes);
[[nodiscard]] std::uint64_t parse_assignment(std::string_view bits);

[[nodiscard]] double linf_distance(const ObservedDistribution& a, const ObservedDistribution& b);

/// CSV with header `assignment,probability`, rows sorted by the assignment
/// string, probabilities with 17 significant digits.
void write_csv(std::ostream& out, const ObservedDistribution& dist);
[[nodiscard]] ObservedDistribution read_csv(std::istream& in, std::vector<std::string> nodes,
                                            DistributionSource source = DistributionSource::Exact);

[[nodiscard]] std::string format_double(double v);

}  // namespace icid
