#include "icid/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "icid/error.hpp"

namespace icid {

PartialAssignment& PartialAssignment::set(int node, bool bit) {
    if (node < 0 || node >= 64) throw Error(ErrorKind::InvalidArgument, "node index out of range");
    const std::uint64_t m = std::uint64_t{1} << node;
    care |= m;
    value = bit ? (value | m) : (value & ~m);
    return *this;
}

PartialAssignment PartialAssignment::prefix(std::string_view bits) {
    PartialAssignment pa;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') {
            throw Error(ErrorKind::InvalidArgument, "assignment must contain only '0' and '1'");
        }
        pa.set(static_cast<int>(i), bits[i] == '1');
    }
    return pa;
}

PartialAssignment PartialAssignment::full(std::uint64_t mask, int num_nodes) {
    const std::uint64_t all = num_nodes >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_nodes) - 1;
    return {all, mask & all};
}

std::optional<PartialAssignment> PartialAssignment::merged(const PartialAssignment& other) const {
    const std::uint64_t shared = care & other.care;
    if ((value & shared) != (other.value & shared)) return std::nullopt;
    return PartialAssignment{care | other.care, value | other.value};
}

PartialAssignment named_partial(const std::vector<std::string>& nodes, const std::map<std::string, int>& states) {
    PartialAssignment pa;
    for (const auto& [name, bit] : states) {
        auto it = std::find(nodes.begin(), nodes.end(), name);
        if (it == nodes.end()) throw Error(ErrorKind::InvalidArgument, "unknown node in assignment: " + name);
        pa.set(static_cast<int>(it - nodes.begin()), bit != 0);
    }
    return pa;
}

std::string_view to_string(DistributionSource source) {
    switch (source) {
        case DistributionSource::Exact: return "exact";
        case DistributionSource::LiveEdge: return "live-edge";
        case DistributionSource::Empirical: return "empirical";
        case DistributionSource::Unrolled: return "unrolled";
    }
    return "exact";
}

ObservedDistribution::ObservedDistribution(std::vector<std::string> nodes, std::vector<double> probabilities,
                                           DistributionSource source, std::uint64_t samples)
    : nodes_(std::move(nodes)), probs_(std::move(probabilities)), source_(source), samples_(samples) {
    if (static_cast<int>(nodes_.size()) > kMaxDenseNodes) {
        throw Error(ErrorKind::SizeGuardExceeded, "too many observed nodes for a dense distribution");
    }
    if (probs_.size() != (std::size_t{1} << nodes_.size())) {
        throw Error(ErrorKind::InvalidArgument, "probability table size does not match 2^n");
    }
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0 + 1e-12)) {
            throw Error(ErrorKind::InvalidArgument, "distribution atom outside [0,1]");
        }
    }
}

double ObservedDistribution::probability(std::string_view bits) const {
    if (bits.size() != nodes_.size()) throw Error(ErrorKind::InvalidArgument, "assignment length mismatch");
    return probs_[parse_assignment(bits)];
}

double ObservedDistribution::total_mass() const {
    CompensatedSum s;
    for (double p : probs_) s.add(p);
    return s.value();
}

double ObservedDistribution::marginal(const PartialAssignment& partial) const {
    const int n = num_nodes();
    const std::uint64_t all = (std::uint64_t{1} << n) - 1;
    if ((partial.care & ~all) != 0) throw Error(ErrorKind::InvalidArgument, "partial assignment names unknown node");
    const std::uint64_t free = all & ~partial.care;
    const std::uint64_t base = partial.value & partial.care;
    // Enumerate subsets of the free bits in increasing order.
    CompensatedSum s;
    std::uint64_t sub = 0;
    do {
        s.add(probs_[base | sub]);
        sub = (sub - free) & free;
    } while (sub != 0);
    return s.value();
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

double marginal(const MarginalSource& dist, const PartialAssignment& partial) {
    return dist.marginal(partial);
}

double conditional(const MarginalSource& dist, const PartialAssignment& target, const PartialAssignment& given) {
    const double denom = dist.marginal(given);
    if (denom <= 1e-300) {
        throw Error(ErrorKind::ZeroConditioningEvent, "conditioning event has zero probability");
    }
    const auto joint = target.merged(given);
    if (!joint) return 0.0;
    return dist.marginal(*joint) / denom;
}

std::string assignment_string(std::uint64_t mask, int num_nodes) {
    std::string s(static_cast<std::size_t>(num_nodes), '0');
    for (int i = 0; i < num_nodes; ++i) {
        if ((mask >> i) & 1U) s[i] = '1';
    }
    return s;
}

std::uint64_t parse_assignment(std::string_view bits) {
    if (bits.size() > 64) throw Error(ErrorKind::InvalidArgument, "assignment longer than 64 nodes");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            mask |= std::uint64_t{1} << i;
        } else if (bits[i] != '0') {
            throw Error(ErrorKind::InvalidArgument, "assignment must contain only '0' and '1'");
        }
    }
    return mask;
}

double linf_distance(const ObservedDistribution& a, const ObservedDistribution& b) {
    if (a.num_nodes() != b.num_nodes()) throw Error(ErrorKind::InvalidArgument, "distributions differ in size");
    double gap = 0.0;
    for (std::size_t i = 0; i < a.probabilities().size(); ++i) {
        gap = std::max(gap, std::fabs(a.probabilities()[i] - b.probabilities()[i]));
    }
    return gap;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const ObservedDistribution& dist) {
    const int n = dist.num_nodes();
    std::vector<std::pair<std::string, double>> rows;
    rows.reserve(dist.probabilities().size());
    for (std::uint64_t m = 0; m < dist.probabilities().size(); ++m) {
        rows.emplace_back(assignment_string(m, n), dist.probabilities()[m]);
    }
    std::sort(rows.begin(), rows.end());
    out << "assignment,probability\n";
    for (const auto& [bits, p] : rows) out << bits << ',' << format_double(p) << '\n';
}

ObservedDistribution read_csv(std::istream& in, std::vector<std::string> nodes, DistributionSource source) {
    const int n = static_cast<int>(nodes.size());
    if (n > kMaxDenseNodes) throw Error(ErrorKind::SizeGuardExceeded, "too many observed nodes");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "empty distribution file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "assignment,probability") throw Error(ErrorKind::Parse, "unexpected CSV header: " + line);
    std::vector<double> probs(std::size_t{1} << n, 0.0);
    std::vector<bool> seen(probs.size(), false);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::Parse, "line " + std::to_string(row) + ": missing comma");
        const std::string bits = line.substr(0, comma);
        if (static_cast<int>(bits.size()) != n) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(row) + ": assignment length mismatch");
        }
        std::uint64_t mask = 0;
        try {
            mask = parse_assignment(bits);
        } catch (const Error&) {
            throw Error(ErrorKind::Parse, "line " + std::to_string(row) + ": bad assignment");
        }
        std::istringstream value(line.substr(comma + 1));
        double p = 0.0;
        if (!(value >> p)) throw Error(ErrorKind::Parse, "line " + std::to_string(row) + ": bad probability");
        if (seen[mask]) throw Error(ErrorKind::Parse, "line " + std::to_string(row) + ": duplicate assignment");
        seen[mask] = true;
        probs[mask] = p;
    }
    return ObservedDistribution(std::move(nodes), std::move(probs), source);
}

}  // namespace icid
