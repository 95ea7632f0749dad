#include "curvlab/errors.hpp"
#include "curvlab/io.hpp"
#include "curvlab/models.hpp"
#include "curvlab/numerics.hpp"
#include "curvlab/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace curvlab;

TEST_CASE("spectral gap") {
    SUBCASE("two-point chain with unit rates has gap 2") {
        const auto chain = helpers::two_point_chain();
        CHECK(spectral_gap(chain) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("the product chain keeps the factor gap") {
        for (int n : {2, 3, 4}) {
            const auto model = build_hypercube(n, 1.0);
            CHECK(spectral_gap(model.chain) == doctest::Approx(2.0).epsilon(1e-10));
        }
    }
    SUBCASE("dense and iterative solvers agree") {
        Rng rng(31);
        const auto chain = helpers::random_reversible_chain(60, rng);
        const double dense = detail::spectral_gap_dense(chain);
        const double lanczos = detail::spectral_gap_iterative(chain);
        CHECK(rel_close(dense, lanczos, 1e-8, 1e-10));
    }
    SUBCASE("curvature lower bounds the gap on the transposition walk") {
        const auto model = build_symmetric_group_walk(4, 2);
        const auto cert = cayley_certificate(model);
        REQUIRE(cert.valid);
        CHECK(spectral_gap(model.chain) >= cert.bound - 1e-9);
    }
}

TEST_CASE("mlsi scan") {
    const auto chain = helpers::two_point_chain();
    // hand evaluation at rho = (1.5, 0.5)
    Density rho;
    rho.rho = Eigen::VectorXd{{1.5, 0.5}};
    Eigen::VectorXd logrho(2);
    logrho << std::log(1.5), std::log(0.5);
    const double ratio = dirichlet(chain, rho.rho, logrho) / (2.0 * entropy(chain, rho));
    CHECK(ratio >= 2.0); // certified bound for the unit two-point chain
    CHECK(ratio == doctest::Approx(0.5 * std::log(3.0) / (2.0 * 0.13081203594113694))
                       .epsilon(1e-12));

    const auto model = build_hypercube(3, 1.0);
    const double min_ratio = mlsi_scan(model.chain, 400, 99);
    CHECK(min_ratio >= 2.0 - 1e-8);
    CHECK(std::isfinite(min_ratio));
}

TEST_CASE("ced scan") {
    const auto model = build_hypercube(3, 1.0);
    CHECK(ced_check(model.chain, 2.0, 400, 7) >= -1e-8);
    // kappa = 0 reduces to nonnegativity of the production term
    CHECK(ced_check(model.chain, 0.0, 400, 7) >= -1e-8);
}

TEST_CASE("bochner scan respects the two-spin certificate") {
    IsingSpec spec;
    spec.n = 2;
    spec.beta = 0.05;
    spec.k = Eigen::MatrixXd{{0.0, 0.25}, {0.25, 0.0}};
    const auto model = build_ising(spec);
    const auto cert = lambda_criterion(model.rep, model.chain.pi);
    REQUIRE(cert.valid);
    ScanOptions opts;
    opts.samples = 500;
    const auto scan = bochner_scan(model.rep, model.chain.pi, opts);
    CHECK(scan.min_ratio >= cert.bound - 1e-8);
}

TEST_CASE("bochner scan on the hypercube stays above the product bound") {
    const auto model = build_hypercube(3, 1.0);
    ScanOptions opts;
    opts.samples = 400;
    opts.refine_top = 4;
    opts.refine_iters = 60;
    const auto result = bochner_scan(model.rep, model.chain.pi, opts);
    CHECK(std::isfinite(result.min_ratio));
    CHECK(result.min_ratio >= 2.0 - 1e-6);
    CHECK(result.argmin_rho.size() == 8);
}

TEST_CASE("bochner scan is deterministic and prefix-monotone") {
    const auto model = build_hypercube(2, 1.0);
    ScanOptions opts;
    opts.samples = 300;
    opts.seed = 4242;
    opts.refine_top = 3;
    opts.refine_iters = 40;
    const auto a = bochner_scan(model.rep, model.chain.pi, opts);
    const auto b = bochner_scan(model.rep, model.chain.pi, opts);
    CHECK(a.min_ratio == b.min_ratio);
    CHECK((a.argmin_rho.array() == b.argmin_rho.array()).all());
    CHECK((a.argmin_psi.array() == b.argmin_psi.array()).all());

    // the raw sample minimum is a running minimum in the sample count
    ScanOptions raw = opts;
    raw.refine_iters = 0;
    raw.refine_top = 1;
    raw.samples = 150;
    const double m150 = bochner_scan(model.rep, model.chain.pi, raw).min_ratio;
    raw.samples = 300;
    const double m300 = bochner_scan(model.rep, model.chain.pi, raw).min_ratio;
    CHECK(m300 <= m150 + 1e-15);
}

TEST_CASE("bochner scan budget guard") {
    MappingRep rep;
    const int n = 3000, m = 300;
    rep.rates = Eigen::MatrixXd::Ones(n, m);
    rep.moves.resize(m);
    for (int d = 0; d < m; ++d) {
        rep.moves[static_cast<std::size_t>(d)].inverse = d;
        rep.moves[static_cast<std::size_t>(d)].to.assign(n, 0);
    }
    const Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    ScanOptions opts;
    CHECK_THROWS_AS(bochner_scan(rep, pi, opts), BudgetExceeded);
}

TEST_CASE("verify_certificate flags a corrupted bound") {
    const auto model = build_hypercube(3, 1.0);
    ScanOptions opts;
    opts.samples = 300;
    opts.refine_top = 3;
    opts.refine_iters = 50;
    const auto good = verify_certificate(model.chain, model.rep, 2.0, opts);
    CHECK(good.all_ok());
    CHECK(good.rng == std::string(kRngName));

    const auto bad = verify_certificate(model.chain, model.rep, 2.5, opts);
    CHECK_FALSE(bad.all_ok());
    CHECK_FALSE(bad.gap_ok); // the gap is exactly 2 < 2.5
}

TEST_CASE("reports serialize deterministically for a fixed seed") {
    const auto model = build_hypercube(2, 1.0);
    ScanOptions opts;
    opts.samples = 120;
    opts.seed = 777;
    opts.refine_top = 2;
    opts.refine_iters = 30;
    const auto r1 = verify_certificate(model.chain, model.rep, 2.0, opts);
    const auto r2 = verify_certificate(model.chain, model.rep, 2.0, opts);
    CHECK(report_to_json(r1).dump() == report_to_json(r2).dump());
}
