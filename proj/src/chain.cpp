#include "curvlab/chain.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <unordered_set>

namespace curvlab {

namespace {

constexpr std::size_t kDefaultStateCap = 20000;
constexpr std::size_t kWitnessCap = 32;

std::string describe(std::size_t x, std::size_t y) {
    std::ostringstream os;
    os << "(" << x << "," << y << ")";
    return os.str();
}

} // namespace

std::size_t state_cap() {
    static const std::size_t cap = [] {
        if (const char* env = std::getenv("CURVLAB_STATE_CAP")) {
            const long long v = std::atoll(env);
            if (v > 1) return static_cast<std::size_t>(v);
        }
        return kDefaultStateCap;
    }();
    return cap;
}

StateSpace StateSpace::indexed(std::size_t n) {
    StateSpace space;
    space.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) space.labels.push_back("s" + std::to_string(i));
    return space;
}

void StateSpace::validate(std::size_t cap) const {
    if (cap == 0) cap = state_cap();
    if (labels.size() < 2) throw TooLarge("state space needs at least 2 states");
    if (labels.size() > cap)
        throw TooLarge("state space size " + std::to_string(labels.size()) +
                       " exceeds cap " + std::to_string(cap) +
                       " (set CURVLAB_STATE_CAP to raise it)");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second) throw InvalidMapping("duplicate state label: " + l);
}

ValidationReport validate_chain(const MarkovChain& chain) {
    ValidationReport report;
    const auto n = chain.Q.rows();
    auto fail = [&](const std::string& kind, const std::string& msg) {
        report.passed = false;
        report.issues.push_back({kind, msg});
    };

    if (chain.Q.cols() != n || chain.pi.size() != n ||
        static_cast<Eigen::Index>(chain.space.size()) != n) {
        fail("shape", "Q, pi and state space sizes disagree");
        return report;
    }

    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            const double q = chain.Q(x, y);
            if (!std::isfinite(q) || q < 0.0) {
                fail("rates", "Q" + describe(x, y) + " is negative or non-finite");
                return report;
            }
        }
        if (chain.Q(x, x) != 0.0) fail("rates", "nonzero diagonal at state " + std::to_string(x));
        if (!(chain.pi(x) > 0.0)) fail("pi_positive", "pi(" + std::to_string(x) + ") <= 0");
    }

    KahanSum mass;
    for (Eigen::Index x = 0; x < n; ++x) mass.add(chain.pi(x));
    if (std::abs(mass.value() - 1.0) > kPiSumTol)
        fail("pi_normalized", "sum pi deviates from 1 by " + std::to_string(mass.value() - 1.0));

    // Strong connectivity of the positive-rate digraph (forward + backward BFS).
    auto reach = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const Eigen::Index x = stack.back();
            stack.pop_back();
            for (Eigen::Index y = 0; y < n; ++y) {
                const double q = forward ? chain.Q(x, y) : chain.Q(y, x);
                if (q > 0.0 && !seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    stack.push_back(y);
                }
            }
        }
        return seen;
    };
    const auto fwd = reach(true);
    const auto bwd = reach(false);
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!fwd[static_cast<std::size_t>(x)] || !bwd[static_cast<std::size_t>(x)]) {
            fail("irreducibility", "state " + std::to_string(x) + " not connected to state 0");
            break;
        }
    }

    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = x + 1; y < n; ++y) {
            const double lhs = chain.Q(x, y) * chain.pi(x);
            const double rhs = chain.Q(y, x) * chain.pi(y);
            if (!rel_close(lhs, rhs, kDetailedBalanceRtol, kDetailedBalanceAtol)) {
                fail("detailed_balance", "Q(x,y)pi(x) != Q(y,x)pi(y) at " + describe(x, y));
                return report;
            }
        }
    }
    return report;
}

void validate_representation(const MappingRep& rep, const Eigen::VectorXd& pi) {
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    if (rep.rates.cols() != m) throw InvalidMapping("rate table has wrong number of columns");
    if (pi.size() != n) throw InvalidMapping("pi size does not match representation");

    for (int d = 0; d < m; ++d) {
        const Move& mv = rep.moves[static_cast<std::size_t>(d)];
        if (static_cast<Eigen::Index>(mv.to.size()) != n)
            throw InvalidMapping("move " + std::to_string(d) + " has wrong map size");
        if (mv.inverse < 0 || mv.inverse >= m)
            throw InvalidMapping("move " + std::to_string(d) + " has out-of-range inverse id");
        if (rep.moves[static_cast<std::size_t>(mv.inverse)].inverse != d)
            throw InvalidMapping("inverse pairing is not an involution on move ids at move " +
                                 std::to_string(d));
        for (Eigen::Index x = 0; x < n; ++x) {
            const double c = rep.rates(x, d);
            if (!std::isfinite(c) || c < 0.0)
                throw InvalidMapping("negative or non-finite rate at (x=" + std::to_string(x) +
                                     ", d=" + std::to_string(d) + ")");
            const std::int32_t y = mv.to[static_cast<std::size_t>(x)];
            if (y != kOutside && (y < 0 || y >= n))
                throw InvalidMapping("move image out of range at x=" + std::to_string(x));
            if (c > 0.0) {
                if (y == kOutside)
                    throw InvalidMapping("positive rate onto an outside image at x=" +
                                         std::to_string(x) + ", move " + std::to_string(d));
                // Definition of a mapping representation: delta^{-1}(delta x) = x
                // wherever c(x,delta) > 0.
                if (rep.apply(mv.inverse, y) != static_cast<std::int32_t>(x))
                    throw InvalidMapping("inverse move does not undo move " + std::to_string(d) +
                                         " at x=" + std::to_string(x));
                const double back = rep.rates(y, mv.inverse);
                const double lhs = c * pi(x);
                const double rhs = back * pi(y);
                if (!rel_close(lhs, rhs, kDetailedBalanceRtol, kDetailedBalanceAtol))
                    throw InvalidMapping("detailed balance fails in moved form at x=" +
                                         std::to_string(x) + ", move " + std::to_string(d));
            }
        }
    }
}

MarkovChain chain_from_mapping(const StateSpace& space, const MappingRep& rep,
                               const Eigen::VectorXd& pi_weights) {
    const Eigen::Index n = rep.n_states();
    if (static_cast<Eigen::Index>(space.size()) != n)
        throw InvalidMapping("state space size does not match representation");
    space.validate();

    KahanSum z;
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!(pi_weights(x) > 0.0) || !std::isfinite(pi_weights(x)))
            throw InvalidMapping("pi weight must be finite and positive at state " +
                                 std::to_string(x));
        z.add(pi_weights(x));
    }
    MarkovChain chain;
    chain.space = space;
    chain.normalizer = z.value();
    chain.pi = pi_weights / chain.normalizer;

    validate_representation(rep, chain.pi);

    chain.Q = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int d = 0; d < rep.n_moves(); ++d) {
            const double c = rep.rates(x, d);
            if (c == 0.0) continue;
            const std::int32_t y = rep.apply(d, static_cast<std::int32_t>(x));
            if (y == static_cast<std::int32_t>(x)) continue;
            chain.Q(x, y) += c;
        }
    }

    const ValidationReport report = validate_chain(chain);
    if (!report.passed)
        throw InvalidMapping("derived chain fails validation: " + report.issues.front().kind +
                             " (" + report.issues.front().message + ")");
    return chain;
}

MappingRep canonical_transposition_representation(const MarkovChain& chain) {
    const Eigen::Index n = chain.Q.rows();
    MappingRep rep;
    std::vector<Eigen::MatrixXd::Scalar> dummy;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> edges;
    for (Eigen::Index x = 0; x < n; ++x)
        for (Eigen::Index y = x + 1; y < n; ++y)
            if (chain.Q(x, y) > 0.0 || chain.Q(y, x) > 0.0) edges.emplace_back(x, y);

    rep.rates = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(edges.size()));
    rep.moves.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [x, y] = edges[e];
        Move mv;
        mv.to.resize(static_cast<std::size_t>(n));
        for (Eigen::Index z2 = 0; z2 < n; ++z2) mv.to[static_cast<std::size_t>(z2)] = static_cast<std::int32_t>(z2);
        mv.to[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(y);
        mv.to[static_cast<std::size_t>(y)] = static_cast<std::int32_t>(x);
        mv.inverse = static_cast<int>(e); // each transposition is its own inverse
        rep.moves.push_back(std::move(mv));
        rep.rates(x, static_cast<Eigen::Index>(e)) = chain.Q(x, y);
        rep.rates(y, static_cast<Eigen::Index>(e)) = chain.Q(y, x);
    }
    return rep;
}

CommutativityReport commutativity_report(const MappingRep& rep) {
    CommutativityReport report;
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();

    for (int d = 0; d < m; ++d)
        if (rep.moves[static_cast<std::size_t>(d)].inverse != d) report.involutive = false;

    for (int d = 0; d < m; ++d) {
        for (int e = d + 1; e < m; ++e) {
            for (Eigen::Index x = 0; x < n; ++x) {
                const std::int32_t xi = static_cast<std::int32_t>(x);
                const std::int32_t de = rep.apply(d, rep.apply(e, xi));
                const std::int32_t ed = rep.apply(e, rep.apply(d, xi));
                if (de == ed) continue;
                report.commutative = false;
                ++report.witness_count;
                if (report.witnesses.size() < kWitnessCap) report.witnesses.push_back({xi, d, e});
                if (rep.rates(x, d) > 0.0 && rep.rates(x, e) > 0.0) {
                    report.essentially_commutative = false;
                    ++report.essential_witness_count;
                    if (report.essential_witnesses.size() < kWitnessCap)
                        report.essential_witnesses.push_back({xi, d, e});
                }
            }
        }
    }
    return report;
}

} // namespace curvlab
