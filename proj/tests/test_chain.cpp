#include "curvlab/chain.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "curvlab/numerics.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace curvlab;

namespace {

bool has_issue(const ValidationReport& report, const std::string& kind) {
    for (const auto& issue : report.issues)
        if (issue.kind == kind) return true;
    return false;
}

} // namespace

TEST_CASE("validate_chain accepts the symmetric two-point chain") {
    const auto chain = helpers::two_point_chain();
    const auto report = validate_chain(chain);
    CHECK(report.passed);
    CHECK(report.issues.empty());
}

TEST_CASE("validate_chain flags a detailed balance violation with a witness") {
    MarkovChain chain;
    chain.space = StateSpace::indexed(2);
    chain.Q = Eigen::MatrixXd{{0.0, 1.0}, {2.0, 0.0}};
    chain.pi = Eigen::VectorXd{{0.5, 0.5}};
    const auto report = validate_chain(chain);
    CHECK_FALSE(report.passed);
    CHECK(has_issue(report, "detailed_balance"));
    CHECK(report.issues.front().message.find("(0,1)") != std::string::npos);
}

TEST_CASE("validate_chain flags an isolated state") {
    MarkovChain chain;
    chain.space = StateSpace::indexed(3);
    chain.Q = Eigen::MatrixXd{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    chain.pi = Eigen::VectorXd{{0.4, 0.4, 0.2}};
    const auto report = validate_chain(chain);
    CHECK_FALSE(report.passed);
    CHECK(has_issue(report, "irreducibility"));
}

TEST_CASE("chain_from_mapping: single involutive swap") {
    StateSpace space = StateSpace::indexed(2);
    MappingRep rep;
    rep.moves.push_back({{1, 0}, 0});
    rep.rates = Eigen::MatrixXd::Ones(2, 1);
    const auto chain = chain_from_mapping(space, rep, Eigen::VectorXd{{0.5, 0.5}});
    CHECK(chain.Q(0, 1) == 1.0);
    CHECK(chain.Q(1, 0) == 1.0);
    CHECK(chain.Q(0, 0) == 0.0);
}

TEST_CASE("chain_from_mapping: two flip moves give the 4-cycle") {
    const auto model = build_hypercube(2, 1.0);
    // each state has exactly its two bit-flip neighbours at unit rate
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
            const int dist = __builtin_popcount(static_cast<unsigned>(x ^ y));
            CHECK(model.chain.Q(x, y) == (dist == 1 ? 1.0 : 0.0));
        }
}

TEST_CASE("chain_from_mapping rejects a false inverse pairing") {
    StateSpace space = StateSpace::indexed(3);
    MappingRep rep;
    // claims to be an involution but acts as a 3-cycle
    rep.moves.push_back({{1, 2, 0}, 0});
    rep.rates = Eigen::MatrixXd::Ones(3, 1);
    CHECK_THROWS_AS(
        chain_from_mapping(space, rep, Eigen::VectorXd::Ones(3) / 3.0), InvalidMapping);
}

TEST_CASE("chain_from_mapping records the normalizer of unnormalized pi") {
    StateSpace space = StateSpace::indexed(2);
    MappingRep rep;
    rep.moves.push_back({{1, 0}, 0});
    rep.rates = Eigen::MatrixXd::Ones(2, 1);
    const auto chain = chain_from_mapping(space, rep, Eigen::VectorXd{{3.0, 3.0}});
    CHECK(chain.normalizer == 6.0);
    CHECK(chain.pi.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("canonical transposition representation") {
    SUBCASE("two-point chain gives one move with both rates") {
        const auto chain = helpers::two_point_chain();
        const auto rep = canonical_transposition_representation(chain);
        REQUIRE(rep.n_moves() == 1);
        CHECK(rep.moves[0].inverse == 0);
        CHECK(rep.rates(0, 0) == 1.0);
        CHECK(rep.rates(1, 0) == 1.0);
    }
    SUBCASE("3-cycle with unit rates gives three swaps") {
        MarkovChain chain;
        chain.space = StateSpace::indexed(3);
        chain.Q = Eigen::MatrixXd{{0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}};
        chain.pi = Eigen::VectorXd::Ones(3) / 3.0;
        const auto rep = canonical_transposition_representation(chain);
        CHECK(rep.n_moves() == 3);
    }
    SUBCASE("round trip reproduces Q bit-exactly on a random reversible chain") {
        Rng rng(5);
        const auto chain = helpers::random_reversible_chain(7, rng);
        REQUIRE(validate_chain(chain).passed);
        const auto rep = canonical_transposition_representation(chain);
        const auto rebuilt = chain_from_mapping(chain.space, rep, chain.pi);
        CHECK((rebuilt.Q.array() == chain.Q.array()).all());
    }
}

TEST_CASE("reversibility identity holds for random observables F") {
    // sum F(x,d) c pi == sum F(dx, d^-1) c pi for any F on X x G
    auto check_rep = [](const MappingRep& rep, const Eigen::VectorXd& pi, std::uint64_t seed) {
        Rng rng(seed);
        const Eigen::Index n = rep.n_states();
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::MatrixXd f(n, rep.n_moves());
            for (Eigen::Index x = 0; x < n; ++x)
                for (int d = 0; d < rep.n_moves(); ++d) f(x, d) = rng.normal();
            KahanSum lhs, rhs;
            for (Eigen::Index x = 0; x < n; ++x)
                for (int d = 0; d < rep.n_moves(); ++d) {
                    const double w = rep.rates(x, d) * pi(x);
                    if (w == 0.0) continue;
                    lhs.add(f(x, d) * w);
                    rhs.add(f(rep.apply(d, static_cast<std::int32_t>(x)), rep.inverse(d)) * w);
                }
            CHECK(rel_close(lhs.value(), rhs.value(), 1e-9, 1e-12));
        }
    };
    SUBCASE("hypercube") {
        const auto model = build_hypercube(3, 1.0);
        check_rep(model.rep, model.chain.pi, 101);
    }
    SUBCASE("ising with interactions") {
        IsingSpec spec;
        spec.n = 3;
        spec.beta = 0.4;
        spec.k = Eigen::MatrixXd{{0.0, 0.3, -0.2}, {0.3, 0.0, 0.5}, {-0.2, 0.5, 0.0}};
        const auto model = build_ising(spec);
        check_rep(model.rep, model.chain.pi, 102);
    }
    SUBCASE("hard-core star with outside images") {
        const auto spec = build_graph_hardcore(4, {{0, 1}, {0, 2}, {0, 3}}, 0.3);
        const auto model = build_hardcore(spec);
        check_rep(model.rep, model.chain.pi, 103);
    }
}

TEST_CASE("commutativity report") {
    SUBCASE("hypercube flips commute and are involutive") {
        const auto model = build_hypercube(3, 1.0);
        const auto report = commutativity_report(model.rep);
        CHECK(report.commutative);
        CHECK(report.essentially_commutative);
        CHECK(report.involutive);
        CHECK(report.witnesses.empty());
    }
    SUBCASE("left-multiplication transpositions on S3 do not commute") {
        const auto model = build_symmetric_group_walk(3, 2);
        const auto report = commutativity_report(model.rep);
        CHECK_FALSE(report.commutative);
        CHECK_FALSE(report.essentially_commutative);
        REQUIRE_FALSE(report.witnesses.empty());
        const auto w = report.witnesses.front();
        const auto de = model.rep.apply(w.delta, model.rep.apply(w.eta, w.x));
        const auto ed = model.rep.apply(w.eta, model.rep.apply(w.delta, w.x));
        CHECK(de != ed);
    }
    SUBCASE("a single move always commutes") {
        StateSpace space = StateSpace::indexed(2);
        MappingRep rep;
        rep.moves.push_back({{1, 0}, 0});
        rep.rates = Eigen::MatrixXd::Ones(2, 1);
        const auto report = commutativity_report(rep);
        CHECK(report.commutative);
    }
    SUBCASE("hard-core is commutative where both rates are positive") {
        const auto spec = build_graph_hardcore(3, {{0, 1}, {1, 2}}, 0.2);
        const auto model = build_hardcore(spec);
        const auto report = commutativity_report(model.rep);
        CHECK_FALSE(report.commutative); // same-site pair fails at empty sites
        CHECK(report.essentially_commutative);
        CHECK_FALSE(report.involutive);
    }
}

TEST_CASE("state cap is enforced") {
    CHECK_THROWS_AS(StateSpace::indexed(1).validate(), TooLarge);
    CHECK_THROWS_AS(StateSpace::indexed(50).validate(10), TooLarge);
}
