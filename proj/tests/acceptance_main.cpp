// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include "curvlab/calculus.hpp"
#include "curvlab/chain.hpp"
#include "curvlab/criteria.hpp"
#include "curvlab/models.hpp"
#include "curvlab/numerics.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace curvlab;

namespace {

struct Criterion9 {
    std::string name;
    std::function<bool(std::string&)> run;
};

bool check(bool ok, std::string& why, const std::string& message) {
    if (!ok && why.empty()) why = message;
    return ok;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::MatrixXd random_symmetric_couplings(int n, double magnitude, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = magnitude * (2.0 * rng.uniform() - 1.0);
            k(i, j) = v;
            k(j, i) = v;
        }
    return k;
}

// --------------------------------------------------------------------------

bool criterion1_thresholds(std::string& why) {
    const auto start = std::chrono::steady_clock::now();
    const double lattice_root = epsilon_threshold(
        [](double b) { return 3.0 * std::exp(6.0 * b) * (std::exp(2.0 * b) - 1.0); });
    const double cw_root =
        epsilon_threshold([](double b) { return 2.0 * b * std::exp(2.0 * b); });
    bool ok = true;
    ok &= check(std::abs(lattice_root - 0.089) <= 0.001, why,
                "lattice root " + std::to_string(lattice_root) + " not within 0.089 +- 0.001");
    ok &= check(std::abs(cw_root - 0.284) <= 0.001, why,
                "curie-weiss root " + std::to_string(cw_root) + " not within 0.284 +- 0.001");
    ok &= check(seconds_since(start) < 1.0, why, "threshold computation exceeded 1 s");
    return ok;
}

bool criterion2_homogeneous(std::string& why) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    for (const auto& [n, rate] : std::vector<std::pair<int, double>>{{2, 1.0}, {3, 1.0}, {4, 0.75}}) {
        const auto model = build_hypercube(n, rate);
        const auto cert = lambda_criterion(model.rep, model.chain.pi);
        ok &= check(cert.valid, why, "lambda criterion invalid on the hypercube");
        ok &= check(cert.bound == 2.0 * rate, why, "hypercube bound is not exactly 2c");
        ScanOptions opts;
        opts.samples = 2000;
        opts.seed = 1000 + static_cast<std::uint64_t>(n);
        const auto scan = bochner_scan(model.rep, model.chain.pi, opts);
        ok &= check(scan.min_ratio >= 2.0 * rate - 1e-6, why,
                    "bochner ratio dipped below 2c - 1e-6 at n=" + std::to_string(n));
    }
    ok &= check(seconds_since(start) < 30.0, why, "homogeneous recovery exceeded 30 s");
    return ok;
}

bool criterion3_ising(std::string& why) {
    bool ok = true;
    for (double beta : {0.02, 0.05}) {
        IsingSpec spec;
        spec.n = 3;
        spec.beta = beta;
        spec.k = random_symmetric_couplings(3, 0.5, beta == 0.02 ? 31337 : 424242);
        const auto model = build_ising(spec);
        const QTable table(model.rep, model.chain.pi);

        // proof inequality at every (x, i, j)
        for (int x = 0; x < 8 && ok; ++x)
            for (int i = 0; i < 3 && ok; ++i)
                for (int j = 0; j < 3 && ok; ++j) {
                    if (i == j) continue;
                    const int dix = model.rep.apply(i, x);
                    const double lhs =
                        (table.q(dix, i, j) - table.qstar(x, i, j)) / table.q(x, i, i);
                    double exponent = 0.0;
                    for (int m = 0; m < 3; ++m) {
                        if (m == i || m == j) continue;
                        exponent += std::abs(spec.k(i, m)) + std::abs(spec.k(j, m));
                    }
                    const double rhs = std::exp(2.0 * beta * exponent) *
                                       (std::exp(4.0 * beta * std::abs(spec.k(i, j))) - 1.0);
                    ok &= check(lhs <= rhs + 1e-12, why,
                                "rate-product estimate failed at beta=" + std::to_string(beta));
                }

        // model epsilon against a direct transcription of the formula
        double direct = 0.0;
        for (int i = 0; i < 3; ++i) {
            double row = 0.0;
            for (int j = 0; j < 3; ++j) {
                if (j == i) continue;
                double exponent = 0.0;
                for (int m = 0; m < 3; ++m) {
                    if (m == i || m == j) continue;
                    exponent += std::abs(spec.k(i, m)) + std::abs(spec.k(j, m));
                }
                row += std::exp(2.0 * beta * exponent) *
                       (std::exp(4.0 * beta * std::abs(spec.k(i, j))) - 1.0);
            }
            direct = std::max(direct, row);
        }
        const double eps = ising_epsilon(spec);
        ok &= check(rel_close(eps, direct, 1e-12, 1e-15), why, "epsilon formula mismatch");
        ok &= check(eps <= 1.0, why, "epsilon unexpectedly above 1 at desk scale");

        const double kappa = (1.0 - eps) * 2.0 * min_positive_rate(model.rep);
        ScanOptions opts;
        opts.samples = 2000;
        opts.seed = 5150;
        const auto report = verify_certificate(model.chain, model.rep, kappa, opts);
        ok &= check(report.bochner_ok, why, "bochner check failed for the ising bound");
        ok &= check(report.gap_ok, why, "spectral gap below the ising bound");
        ok &= check(report.ced_ok, why, "convex entropy decay check failed");
    }
    return ok;
}

bool criterion4_hardcore(std::string& why) {
    bool ok = true;
    const double rho = 0.1;
    struct Graph {
        std::string name;
        int vertices;
        std::vector<std::pair<int, int>> edges;
        int max_degree;
    };
    const std::vector<Graph> graphs = {
        {"K13", 4, {{0, 1}, {0, 2}, {0, 3}}, 3},
        {"C5", 5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}, 2},
        {"P4", 4, {{0, 1}, {1, 2}, {2, 3}}, 2},
    };
    for (const auto& graph : graphs) {
        const auto spec = build_graph_hardcore(graph.vertices, graph.edges, rho);
        const auto model = build_hardcore(spec);
        ok &= check(model.eps0 == rho * graph.max_degree, why,
                    graph.name + ": eps0 != rho * max degree");
        ok &= check(model.eps1 == rho, why, graph.name + ": eps1 != rho");
        const auto cert = hardcore_split_certificate(model);
        ok &= check(cert.valid, why, graph.name + ": split certificate invalid");
        ok &= check(std::abs(cert.intermediates.at("lambda1") - model.eps1) <= 1e-12, why,
                    graph.name + ": lambda1 != eps1");
        ok &= check(std::abs(cert.intermediates.at("lambda2") - (1.0 - model.eps0)) <= 1e-12,
                    why, graph.name + ": lambda2 != 1 - eps0");
        ok &= check(std::abs(cert.bound - 0.5 * (1.0 - model.eps0 + model.eps1)) <= 1e-12, why,
                    graph.name + ": bound != (1 - eps0 + eps1)/2");
    }

    // rods: brute-force blocking sum at an interior rod equals rho (k^2+4k+1)
    const double rod_rho = 0.125;
    const auto [rod_spec, rod_info] = build_rods(6, 2, rod_rho);
    ok &= check(rod_info.interior_rod >= 0, why, "no interior rod found at L=6");
    Config singleton(static_cast<std::size_t>(rod_spec.n_sites), 0);
    singleton[static_cast<std::size_t>(rod_info.interior_rod)] = 1;
    const double blocking =
        hardcore_blocking_sum(rod_spec, singleton, rod_info.interior_rod);
    ok &= check(blocking == 13.0 * rod_rho, why, "interior rod blocking sum != 13 rho");

    // a buildable rod box exercises the split criterion end to end
    const auto [small_spec, small_info] = build_rods(3, 2, 0.05);
    (void)small_info;
    const auto small = build_hardcore(small_spec);
    const auto cert = hardcore_split_certificate(small);
    ok &= check(cert.valid, why, "rods split certificate invalid");
    ok &= check(std::abs(cert.intermediates.at("lambda1") - small.eps1) <= 1e-12, why,
                "rods: lambda1 != eps1");
    ok &= check(std::abs(cert.intermediates.at("lambda2") - (1.0 - small.eps0)) <= 1e-12, why,
                "rods: lambda2 != 1 - eps0");
    return ok;
}

bool criterion5_cayley(std::string& why) {
    bool ok = true;
    const auto model = build_symmetric_group_walk(4, 2);
    const auto cert = cayley_certificate(model);
    ok &= check(cert.valid, why, "cayley certificate invalid on S4 transpositions");
    ok &= check(cert.criterion == Criterion::CayleyInvolutive, why,
                "involutive branch not selected");
    ok &= check(std::abs(cert.bound - 2.0 / 6.0) <= 1e-15, why, "bound != 2/|G|");
    const double gap = spectral_gap(model.chain);
    ok &= check(gap >= cert.bound - 1e-9, why, "spectral gap below the certified bound");
    return ok;
}

bool criterion6_lemmas(std::string& why) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    Rng rng(606060);

    // logarithmic-mean identities over 10^4 random quadruples
    for (int trial = 0; trial < 10000 && ok; ++trial) {
        const double u = std::exp(2.0 * rng.normal());
        const double v = std::exp(2.0 * rng.normal());
        const double s = std::exp(2.0 * rng.normal());
        const double t = std::exp(2.0 * rng.normal());
        const auto [du, dv] = log_mean_partials(u, v);
        ok &= check(rel_close(u * du + v * dv, log_mean(u, v), 1e-10, 0.0), why,
                    "euler identity failed");
        const auto [d1, d2] = log_mean_partials(s, t);
        ok &= check(u * d1 + v * d2 >= log_mean(u, v) - 1e-10 * std::max(1.0, log_mean(u, v)),
                    why, "domination inequality failed");
    }

    // diagonal bounds and log-density identities per model
    struct ModelCase {
        std::string name;
        MappingRep rep;
        Eigen::VectorXd pi;
        MarkovChain chain;
    };
    std::vector<ModelCase> models;
    {
        const auto m = build_hypercube(3, 1.0);
        models.push_back({"hypercube", m.rep, m.chain.pi, m.chain});
    }
    {
        IsingSpec spec;
        spec.n = 3;
        spec.beta = 0.05;
        spec.k = random_symmetric_couplings(3, 0.5, 77);
        const auto m = build_ising(spec);
        models.push_back({"ising", m.rep, m.chain.pi, m.chain});
    }
    {
        const auto spec = build_graph_hardcore(4, {{0, 1}, {1, 2}, {2, 3}}, 0.2);
        const auto m = build_hardcore(spec);
        models.push_back({"hardcore", m.rep, m.chain.pi, m.chain});
    }
    for (const auto& m : models) {
        Rng local(31415);
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            Eigen::VectorXd w(m.pi.size()), psi(m.pi.size());
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                w(i) = 1e-4 + local.exponential();
                psi(i) = local.normal();
            }
            const Density rho = make_density(m.pi, w);
            KahanSum diag;
            for (Eigen::Index x = 0; x < m.rep.n_states(); ++x)
                for (int d = 0; d < m.rep.n_moves(); ++d) {
                    const double c = m.rep.rates(x, d);
                    if (c == 0.0) continue;
                    diag.add(b_term(m.rep, rho, psi, static_cast<std::int32_t>(x), d, d) * c *
                             m.pi(x));
                }
            const double a = action_A(m.rep, m.pi, rho, psi);
            ok &= check(diag.value() >= 2.0 * a - 1e-9 * std::max(1.0, a), why,
                        m.name + ": diagonal bound failed");

            // half set: one representative per inverse pair
            KahanSum half;
            for (Eigen::Index x = 0; x < m.rep.n_states(); ++x)
                for (int d = 0; d < m.rep.n_moves(); ++d) {
                    if (m.rep.inverse(d) < d) continue;
                    const double c = m.rep.rates(x, d);
                    if (c == 0.0) continue;
                    half.add(b_term(m.rep, rho, psi, static_cast<std::int32_t>(x), d, d) * c *
                             m.pi(x));
                }
            ok &= check(half.value() >= 0.5 * a - 1e-9 * std::max(1.0, a), why,
                        m.name + ": half-set diagonal bound failed");

            Eigen::VectorXd logrho(m.pi.size());
            for (Eigen::Index i = 0; i < logrho.size(); ++i) logrho(i) = std::log(rho.rho(i));
            const double a_log = action_A(m.rep, m.pi, rho, logrho);
            const double e_log = dirichlet(m.chain, rho.rho, logrho);
            ok &= check(rel_close(a_log, e_log, 1e-9, 1e-12), why,
                        m.name + ": A(rho, log rho) != E(rho, log rho)");
            // the production term is twice the Hessian on the flow direction
            // (the printed identity omits the 1/2; see the decisions ledger)
            const double b_log = hessian_B(m.rep, m.pi, rho, logrho);
            const double ced = ced_production(m.chain, rho);
            ok &= check(rel_close(2.0 * b_log, ced, 1e-9, 1e-11), why,
                        m.name + ": 2 B(rho, log rho) != convex-decay production");
        }
    }

    // pointwise 2x2 dominance over 10^4 random (a, b, s, t, r)
    for (int trial = 0; trial < 10000 && ok; ++trial) {
        const double s = std::exp(1.5 * rng.normal());
        const double t = std::exp(1.5 * rng.normal());
        const double r = std::exp(1.5 * rng.normal());
        const double a = rng.normal();
        const double b = rng.normal();
        const double m11 = log_mean_partials(s, t).first * (r - s) +
                           log_mean_partials(t, s).first * (s - t) + 2.0 * log_mean(t, s);
        const double m22 = log_mean_partials(s, r).first * (t - s) +
                           log_mean_partials(r, s).first * (s - r) + 2.0 * log_mean(r, s);
        const double m12 = log_mean(s, t) + log_mean(s, r);
        const double slack = 1e-12 * std::max({1.0, m11, m22, m12});
        ok &= check(m11 >= m12 - slack && m22 >= m12 - slack, why,
                    "2x2 diagonal dominance failed");
        ok &= check(a * a * m11 + 2.0 * a * b * m12 + b * b * m22 >=
                        -1e-10 * std::max(1.0, a * a + b * b),
                    why, "pointwise quadratic form went negative");
    }

    ok &= check(seconds_since(start) < 60.0, why, "lemma suite exceeded 60 s");
    return ok;
}

bool criterion7_exclusions(std::string& why) {
    (void)why;
    std::puts("  note: sharpness of the bounds, infinite-volume/large-n uniformity, and all");
    std::puts("  quantities needing the transport distance or geodesics are out of scope at");
    std::puts("  desk scale; criteria 2, 3 and 6 stand in for them.");
    return true;
}

} // namespace

int main() {
    const std::vector<Criterion9> criteria = {
        {"1 threshold reproduction", criterion1_thresholds},
        {"2 homogeneous recovery", criterion2_homogeneous},
        {"3 ising consistency", criterion3_ising},
        {"4 hard-core closed forms", criterion4_hardcore},
        {"5 cayley walks", criterion5_cayley},
        {"6 lemma property suites", criterion6_lemmas},
        {"7 desk-scale exclusions", criterion7_exclusions},
    };
    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string why;
        bool ok = false;
        try {
            ok = criterion.run(why);
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (ok) {
            std::printf("PASS  criterion %s\n", criterion.name.c_str());
        } else {
            ++failures;
            std::printf("FAIL  criterion %s: %s\n", criterion.name.c_str(), why.c_str());
        }
        std::fflush(stdout);
    }
    return failures;
}
