#include "icid/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "icid/error.hpp"
#include "icid/exact.hpp"

namespace icid {

namespace {

constexpr double kIdentityTolerance = 1e-8;
constexpr double kClipWindow = 1e-7;
constexpr double kTiny = 1e-14;

// Reports identity violations either by throwing or by recording a warning.
struct Checker {
    bool lenient = false;
    std::vector<std::string>* warnings = nullptr;

    void fail(ErrorKind kind, const std::string& message) const {
        if (!lenient) throw Error(kind, message);
        if (warnings) warnings->push_back(message);
    }
};

double r_at(const ChainParams& k, int t) { return t < k.n ? k.r[t - 1] : 0.0; }
double q1_at(const ChainParams& k, int t) { return t < k.n ? k.q1[t - 1] : 0.0; }

void require_chain_source(const MarginalSource& dist, int n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "a chain needs at least two nodes");
    if (dist.num_nodes() != n) throw Error(ErrorKind::InvalidArgument, "distribution size does not match chain length");
}

double prefix_marginal(const MarginalSource& dist, std::string_view bits) {
    return dist.marginal(PartialAssignment::prefix(bits));
}

AbcTriple abc_impl(const MarginalSource& dist, const ChainParams& k, std::string_view gamma, const Checker& check) {
    const int len = static_cast<int>(gamma.size());
    if (len < 1 || len > k.n) throw Error(ErrorKind::InvalidArgument, "gamma length must be in 1..n");
    auto verify = [&](double a, double b, double c, int t) {
        if (std::fabs(a - (b + c)) > kIdentityTolerance) {
            check.fail(ErrorKind::InconsistentPrior,
                       "a != b + c at prefix " + std::string(gamma.substr(0, t)) + " (gap " + format_double(a - b - c) + ")");
        }
    };
    const double r = r_at(k, 1);
    const double q = q1_at(k, 1);
    double b = gamma[0] == '1' ? 0.0 : 1.0 - r;
    double c = gamma[0] == '1' ? r * q : r * (1.0 - q);
    double a = prefix_marginal(dist, gamma.substr(0, 1));
    verify(a, b, c, 1);
    for (int t = 2; t <= len; ++t) {
        const double f = gamma[t - 2] == '1' ? 1.0 - k.p[t - 2] : 1.0;
        const double s = b + (1.0 - k.q2[t - 2]) * c;
        const double rt = r_at(k, t);
        const double qt = q1_at(k, t);
        if (gamma[t - 1] == '0') {
            b = (1.0 - rt) * f * s;
            c = rt * (1.0 - qt) * f * s;
        } else {
            b = (1.0 - rt) * (a - f * s);
            c = rt * (a - (1.0 - qt) * f * s);
        }
        a = prefix_marginal(dist, gamma.substr(0, t));
        verify(a, b, c, t);
    }
    return {std::string(gamma), a, b, c};
}

// `k_next` is r q1 at position |beta| + 1.
CoPair co_impl(const MarginalSource& dist, const ChainParams& k, std::string_view beta, double k_next,
               const Checker& check) {
    const int len = static_cast<int>(beta.size());
    const AbcTriple abc = abc_impl(dist, k, beta, check);
    const double f = beta.back() == '1' ? 1.0 - k.p[len - 1] : 1.0;
    const double d = f * (abc.b + (1.0 - k.q2[len - 1]) * abc.c);
    return {std::string(beta), d - abc.a, -k_next * d};
}

std::string bits_msb_first(std::uint64_t m, int len) {
    std::string s(static_cast<std::size_t>(len), '0');
    for (int i = 0; i < len; ++i) {
        if ((m >> (len - 1 - i)) & 1U) s[i] = '1';
    }
    return s;
}

class Solver {
public:
    Solver(const MarginalSource& dist, int n, const PriorKnowledge& prior, const ChainOptions& options,
           ChainResult& out)
        : dist_(dist), n_(n), prior_(prior), out_(out) {
        check_.lenient = dist.is_empirical() && !options.strict;
        check_.warnings = &out.warnings;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        ChainParams& k = out.params;
        k.n = n;
        k.p.assign(n - 1, nan);
        k.r.assign(n - 1, nan);
        k.q1.assign(n - 1, nan);
        k.q2.assign(n - 1, nan);
        k.p[0] = prior.p1;
        (prior.kind == PriorKnowledge::Kind::Q2 ? k.q2 : k.r) = prior.values;
    }

    void run() {
        double rq_next = base_case();
        for (int t = 3; t <= n_; ++t) rq_next = step(t, rq_next);
    }

private:
    double a(std::string_view bits) const { return prefix_marginal(dist_, bits); }

    // Extracted values must be probabilities; a clear violation means the
    // prior does not belong to this distribution.
    double extracted(double v, const std::string& what) {
        if (v < -kClipWindow || v > 1.0 + kClipWindow || !std::isfinite(v)) {
            check_.fail(ErrorKind::InconsistentPrior,
                        "extracted " + what + " = " + format_double(v) + " lies outside [0,1]");
            if (!std::isfinite(v)) throw Error(ErrorKind::BoundaryParameter, what + " is not finite");
        }
        return std::clamp(v, 0.0, 1.0);
    }

    static double divide(double num, double den, const std::string& what) {
        if (std::fabs(den) <= kTiny) {
            throw Error(ErrorKind::BoundaryParameter, "division by a vanishing quantity while solving for " + what);
        }
        return num / den;
    }

    double base_case() {
        ChainParams& k = out_.params;
        const double p1 = k.p[0];
        const double big_a = 1.0 - a("0");
        const double a00 = a("00");
        const double a10 = a("10");
        double one_minus_r2q = 1.0;
        if (prior_.kind == PriorKnowledge::Kind::Q2) {
            const double q12 = k.q2[0];
            if (n_ > 2) one_minus_r2q = divide(a10, (1.0 - p1) * big_a * (1.0 - q12), "r2 q21");
            k.r[0] = extracted(big_a + divide(1.0 - big_a - divide(a00, one_minus_r2q, "r1"), q12, "r1"), "r1");
            k.q1[0] = extracted(divide(big_a, k.r[0], "q11"), "q11");
        } else {
            const double r1 = k.r[0];
            k.q1[0] = extracted(divide(big_a, r1, "q11"), "q11");
            if (n_ == 2) {
                k.q2[0] = extracted(divide(1.0 - big_a - a00, r1 - big_a, "q12"), "q12");
            } else {
                const double num = a10 * (1.0 - big_a) - a00 * (1.0 - p1) * big_a;
                const double den = a10 * (r1 - big_a) - a00 * (1.0 - p1) * big_a;
                k.q2[0] = extracted(divide(num, den, "q12"), "q12");
                one_minus_r2q = divide(a10, (1.0 - p1) * big_a * (1.0 - k.q2[0]), "r2 q21");
            }
        }
        return n_ > 2 ? extracted(1.0 - one_minus_r2q, "r2 q21") : 0.0;
    }

    // Solves position t-1 given rq = r_{t-1} q_{t-1,1}; returns r_t q_{t,1}.
    double step(int t, double rq) {
        ChainParams& k = out_.params;
        const int blen = t - 2;
        struct Row {
            double u1, u2;
        };
        std::vector<Row> rows;
        const std::uint64_t count = std::uint64_t{1} << blen;
        std::optional<std::pair<Row, Row>> chosen;
        for (std::uint64_t m = 0; m < count && !chosen; ++m) {
            const std::string beta = bits_msb_first(m, blen);
            const double a_b10 = a(beta + "10");
            if (a_b10 <= 1e-300) continue;
            const CoPair co = co_impl(dist_, k, beta, rq, check_);
            const Row row{co.co1 / a_b10, co.co2 / a_b10};
            for (const Row& prev : rows) {
                if (chosen) break;
                const double det = prev.u1 * row.u2 - prev.u2 * row.u1;
                const double scale = std::hypot(prev.u1, prev.u2) * std::hypot(row.u1, row.u2);
                if (std::fabs(det) > 1e-10 * scale) chosen = std::make_pair(prev, row);
            }
            rows.push_back(row);
        }
        if (!chosen) {
            throw Error(ErrorKind::SingularSystem, "no pair of prefixes gives a solvable system at position " +
                                                       std::to_string(t - 1));
        }
        const double alpha = chosen->first.u1 - chosen->second.u1;
        const double beta = chosen->first.u2 - chosen->second.u2;
        const std::string at = std::to_string(t - 1);
        double x = 0.0;
        double y = 0.0;
        if (prior_.kind == PriorKnowledge::Kind::Q2) {
            y = k.q2[t - 2];
            x = 1.0 - divide(beta * (y - 1.0), alpha, "r" + at + " q" + at + ",2");
            k.r[t - 2] = extracted(divide(x, y, "r" + at), "r" + at);
        } else {
            const double r = k.r[t - 2];
            y = extracted(divide(alpha + beta, alpha * r + beta, "q" + at + ",2"), "q" + at + ",2");
            k.q2[t - 2] = y;
        }
        k.q1[t - 2] = extracted(divide(rq, k.r[t - 2], "q" + at + ",1"), "q" + at + ",1");

        const std::string zeros(static_cast<std::size_t>(t - 1), '0');
        const AbcTriple g0 = abc_impl(dist_, k, zeros, check_);
        const double s0 = g0.b + (1.0 - y) * g0.c;
        double rq_next = 0.0;
        if (t < n_) rq_next = extracted(1.0 - divide(a(zeros + "0"), s0, "r" + std::to_string(t)), "r q at " + std::to_string(t));

        const std::string one = std::string(static_cast<std::size_t>(t - 2), '0') + "1";
        const AbcTriple g1 = abc_impl(dist_, k, one, check_);
        const double s1 = g1.b + (1.0 - y) * g1.c;
        k.p[t - 2] = extracted(1.0 - divide(a(one + "0"), (1.0 - rq_next) * s1, "p" + at), "p" + at);
        return rq_next;
    }

    const MarginalSource& dist_;
    int n_;
    const PriorKnowledge& prior_;
    ChainResult& out_;
    Checker check_;
};

}  // namespace

ChainParams ChainParams::uniform(int n, double value) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "a chain needs at least two nodes");
    ChainParams c;
    c.n = n;
    c.p.assign(n - 1, value);
    c.r.assign(n - 1, value);
    c.q1.assign(n - 1, value);
    c.q2.assign(n - 1, value);
    return c;
}

CausalICModel chain_model(const ChainParams& params) {
    const int n = params.n;
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "a chain needs at least two nodes");
    const auto m = static_cast<std::size_t>(n - 1);
    if (params.p.size() != m || params.r.size() != m || params.q1.size() != m || params.q2.size() != m) {
        throw Error(ErrorKind::InvalidArgument, "chain parameter sequences must have length n-1");
    }
    CausalICModel model;
    for (int i = 1; i <= n; ++i) model.observed.push_back("V" + std::to_string(i));
    for (int t = 1; t < n; ++t) {
        const std::string u = "U" + std::to_string(t);
        const std::string v = "V" + std::to_string(t);
        const std::string w = "V" + std::to_string(t + 1);
        model.hidden.push_back({u, params.r[t - 1]});
        model.vv_edges.push_back({v, w, params.p[t - 1]});
        model.uv_edges.push_back({u, v, params.q1[t - 1]});
        model.uv_edges.push_back({u, w, params.q2[t - 1]});
    }
    return model;
}

ChainParams chain_params_of(const CausalICModel& model) {
    const auto layout = chain_layout(model);
    if (!layout) throw Error(ErrorKind::ClassMismatch, "model is not a confounded chain");
    const IndexedModel im = index_model(model);
    ChainParams c;
    c.n = im.num_observed;
    for (int t = 0; t + 1 < c.n; ++t) {
        const int u = layout->hidden_at[t];
        c.r.push_back(im.r[u]);
        for (const auto& link : im.hidden_out[u]) {
            (link.node == t ? c.q1 : c.q2).push_back(link.weight);
        }
        for (const auto& link : im.observed_out[t]) c.p.push_back(link.weight);
    }
    return c;
}

double max_abs_difference(const ChainParams& a, const ChainParams& b) {
    if (a.n != b.n) throw Error(ErrorKind::InvalidArgument, "chains differ in length");
    double gap = 0.0;
    for (auto field : {&ChainParams::p, &ChainParams::r, &ChainParams::q1, &ChainParams::q2}) {
        const auto& x = a.*field;
        const auto& y = b.*field;
        for (std::size_t i = 0; i < x.size(); ++i) gap = std::max(gap, std::fabs(x[i] - y[i]));
    }
    return gap;
}

AbcTriple chain_abc(const MarginalSource& dist, const ChainParams& known, std::string_view gamma) {
    require_chain_source(dist, known.n);
    return abc_impl(dist, known, gamma, Checker{});
}

CoPair co_coefficients(const MarginalSource& dist, const ChainParams& known, std::string_view beta) {
    require_chain_source(dist, known.n);
    const int len = static_cast<int>(beta.size());
    if (len < 1 || len + 2 > known.n) throw Error(ErrorKind::InvalidArgument, "beta length must be in 1..n-2");
    return co_impl(dist, known, beta, known.r[len] * known.q1[len], Checker{});
}

ChainResult identify_chain(const MarginalSource& dist, int n, const PriorKnowledge& prior,
                           const ChainOptions& options) {
    require_chain_source(dist, n);
    if (prior.values.size() != static_cast<std::size_t>(n - 1)) {
        throw Error(ErrorKind::InvalidArgument, "prior sequence must have length n-1");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(prior.p1) || !std::all_of(prior.values.begin(), prior.values.end(), in_unit)) {
        throw Error(ErrorKind::InvalidArgument, "prior values must lie in [0,1]");
    }
    ChainResult out;
    Solver(dist, n, prior, options, out).run();

    if (options.resimulate && 2 * n - 1 <= SizeGuard{}.max_units) {
        const ObservedDistribution sim = exact_joint(chain_model(out.params));
        double gap = 0.0;
        for (std::uint64_t m = 0; m < sim.probabilities().size(); ++m) {
            gap = std::max(gap, std::fabs(sim.probability(m) - dist.marginal(PartialAssignment::full(m, n))));
        }
        out.resimulation_gap = gap;
        if (gap > options.resimulation_tolerance) {
            const std::string message = "recovered chain reproduces the distribution only to " + format_double(gap);
            if (dist.is_empirical() && !options.strict) {
                out.warnings.push_back(message);
            } else {
                throw Error(ErrorKind::InconsistentPrior, message);
            }
        }
    } else if (options.resimulate) {
        out.warnings.push_back("chain too long to re-simulate; skipped the consistency check");
    }
    return out;
}

PriorKnowledge prior_from(const ChainParams& truth, PriorKnowledge::Kind kind) {
    return {truth.p.at(0), kind, kind == PriorKnowledge::Kind::Q2 ? truth.q2 : truth.r};
}

int min_known_bound(int n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be at least 2");
    return (n - 1) / 2;
}

}  // namespace icid
