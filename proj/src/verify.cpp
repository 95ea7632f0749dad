#include "curvlab/verify.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"
#include "curvlab/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace curvlab {

namespace {

constexpr double kActionCutoff = 1e-12;  // samples with A below this are skipped
constexpr double kEntropyCutoff = 1e-12; // densities too close to 1 are skipped
constexpr Eigen::Index kDenseEigenLimit = 5000;

Eigen::VectorXd sample_density_weights(Rng& rng, Eigen::Index n, double floor) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = floor + rng.exponential();
    return w;
}

Eigen::VectorXd sample_potential(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd psi(n);
    for (Eigen::Index i = 0; i < n; ++i) psi(i) = rng.normal();
    return psi;
}

struct Candidate {
    double ratio = 0.0;
    Eigen::VectorXd rho_weights;
    Eigen::VectorXd psi;
};

double ratio_objective(const MappingRep& rep, const Eigen::VectorXd& pi,
                       const Eigen::VectorXd& weights, const Eigen::VectorXd& psi,
                       bool& defined) {
    const Density rho = make_density(pi, weights);
    const double a = action_A(rep, pi, rho, psi);
    if (a < kActionCutoff) {
        defined = false;
        return 0.0;
    }
    defined = true;
    return hessian_B(rep, pi, rho, psi) / a;
}

/// Coordinate descent engine for the Bochner ratio. Both A and B are
/// 1-homogeneous in rho, so the ratio can be driven on unnormalized weights;
/// a coordinate move then touches only the rows whose terms reference the
/// changed state, which keeps a trial at O(|G|^2) instead of a full
/// re-evaluation.
class RefineEngine {
  public:
    RefineEngine(const MappingRep& rep, const Eigen::VectorXd& pi, const Candidate& cand)
        : rep_(rep), pi_(pi), w_(cand.rho_weights), psi_(cand.psi) {
        const Eigen::Index n = rep.n_states();
        rows_.resize(static_cast<std::size_t>(n));
        affected_.resize(static_cast<std::size_t>(n));
        for (Eigen::Index x = 0; x < n; ++x) {
            Row& row = rows_[static_cast<std::size_t>(x)];
            for (int d = 0; d < rep.n_moves(); ++d) {
                const double c = rep.rates(x, d);
                if (c == 0.0) continue;
                const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
                if (dx == kOutside) continue;
                row.pairs.push_back({dx, c * pi(x), c, 0.0, 0.0});
                affected_[static_cast<std::size_t>(dx)].push_back(x);
            }
            affected_[static_cast<std::size_t>(x)].push_back(x);
        }
        for (auto& list : affected_) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        for (Eigen::Index x = 0; x < n; ++x) refresh_pair_cache(x);
        anchor();
    }

    double ratio() const { return b_total_ / a_total_; }
    const Eigen::VectorXd& weights() const { return w_; }
    const Eigen::VectorXd& psi() const { return psi_; }

    /// One full greedy pass over all psi and weight coordinates.
    bool sweep(double step, double floor) {
        bool improved = false;
        const Eigen::Index n = rep_.n_states();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scale = step * (1.0 + std::abs(psi_(i)));
            for (double dir : {+1.0, -1.0})
                improved |= try_psi(i, psi_(i) + dir * scale);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            for (double factor : {1.0 + step, 1.0 / (1.0 + step)})
                improved |= try_weight(i, std::max(w_(i) * factor, floor));
        }
        anchor(); // re-accumulate so incremental drift cannot build up
        return improved;
    }

  private:
    struct Pair {
        std::int32_t to;
        double weight; // c(x,d) pi(x)
        double rate;   // c(x,d)
        double theta;  // log_mean(w_x, w_to), cached
        double d1;     // d1 log_mean(w_x, w_to), cached
    };
    struct Row {
        std::vector<Pair> pairs; // moves with positive rate out of x
        double a = 0.0;
        double b = 0.0;
    };

    void refresh_pair_cache(Eigen::Index x) {
        for (Pair& p : rows_[static_cast<std::size_t>(x)].pairs) {
            p.theta = log_mean(w_(x), w_(p.to));
            p.d1 = log_mean_partials(w_(x), w_(p.to)).first;
        }
    }

    void compute_row(Eigen::Index x, double& a, double& b) const {
        a = 0.0;
        b = 0.0;
        const Row& row = rows_[static_cast<std::size_t>(x)];
        for (const Pair& pd : row.pairs) {
            const double gd = psi_(pd.to) - psi_(x);
            a += 0.5 * gd * gd * pd.theta * pd.weight;
            const double half_gd2_d1 = 0.5 * gd * gd * pd.d1;
            double inner = 0.0;
            for (const Pair& pe : row.pairs)
                inner += (half_gd2_d1 * (w_(pe.to) - w_(x)) +
                          gd * (psi_(pe.to) - psi_(x)) * pd.theta) *
                         pe.rate;
            b += inner * pd.weight;
        }
    }

    // Evaluates the objective change from rewriting one coordinate; commits
    // and returns true when the ratio improves.
    template <typename Commit>
    bool try_move(Eigen::Index i, Commit&& commit, bool rho_move) {
        double a_new = a_total_;
        double b_new = b_total_;
        const auto& touched = affected_[static_cast<std::size_t>(i)];
        commit(); // tentatively apply to w_/psi_
        if (rho_move)
            for (Eigen::Index x : touched) refresh_pair_cache(x);
        std::vector<std::pair<double, double>> fresh(touched.size());
        for (std::size_t k = 0; k < touched.size(); ++k) {
            const Row& row = rows_[static_cast<std::size_t>(touched[k])];
            compute_row(touched[k], fresh[k].first, fresh[k].second);
            a_new += fresh[k].first - row.a;
            b_new += fresh[k].second - row.b;
        }
        if (a_new > 1e-9 * a_scale_ && b_new / a_new < b_total_ / a_total_) {
            for (std::size_t k = 0; k < touched.size(); ++k) {
                Row& row = rows_[static_cast<std::size_t>(touched[k])];
                row.a = fresh[k].first;
                row.b = fresh[k].second;
            }
            a_total_ = a_new;
            b_total_ = b_new;
            return true;
        }
        return false; // roll back
    }

    bool try_psi(Eigen::Index i, double value) {
        const double old = psi_(i);
        const bool ok = try_move(i, [&] { psi_(i) = value; }, false);
        if (!ok) psi_(i) = old;
        return ok;
    }

    bool try_weight(Eigen::Index i, double value) {
        const double old = w_(i);
        const bool ok = try_move(i, [&] { w_(i) = value; }, true);
        if (!ok) {
            w_(i) = old;
            for (Eigen::Index x : affected_[static_cast<std::size_t>(i)]) refresh_pair_cache(x);
        }
        return ok;
    }

    void anchor() {
        KahanSum a, b;
        for (Eigen::Index x = 0; x < rep_.n_states(); ++x) {
            Row& row = rows_[static_cast<std::size_t>(x)];
            compute_row(x, row.a, row.b);
            a.add(row.a);
            b.add(row.b);
        }
        a_total_ = a.value();
        b_total_ = b.value();
        if (a_scale_ == 0.0) a_scale_ = a_total_;
    }

    const MappingRep& rep_;
    const Eigen::VectorXd& pi_;
    Eigen::VectorXd w_;
    Eigen::VectorXd psi_;
    std::vector<Row> rows_;
    std::vector<std::vector<Eigen::Index>> affected_;
    double a_total_ = 0.0;
    double b_total_ = 0.0;
    double a_scale_ = 0.0;
};

/// Greedy coordinate descent on (rho, psi) with multiplicative rho moves,
/// projection back to the floor and step halving when a sweep stalls. The
/// returned ratio is re-evaluated through the plain library path.
Candidate refine_candidate(const MappingRep& rep, const Eigen::VectorXd& pi, Candidate cand,
                           const ScanOptions& opts) {
    RefineEngine engine(rep, pi, cand);
    double step = 0.25;
    for (int iter = 0; iter < opts.refine_iters; ++iter) {
        if (!engine.sweep(step, opts.refine_floor)) {
            step *= 0.5;
            if (step < 1e-7) break;
        }
    }
    Candidate refined;
    refined.rho_weights = engine.weights();
    refined.psi = engine.psi();
    bool defined = false;
    const double r = ratio_objective(rep, pi, refined.rho_weights, refined.psi, defined);
    refined.ratio = defined ? r : cand.ratio;
    if (!defined || refined.ratio > cand.ratio) return cand;
    return refined;
}

} // namespace

BochnerResult bochner_scan(const MappingRep& rep, const Eigen::VectorXd& pi,
                           const ScanOptions& opts) {
    const Eigen::Index n = rep.n_states();
    const double cost = static_cast<double>(n) * rep.n_moves() * rep.n_moves();
    if (cost > 2e8) throw BudgetExceeded("bochner_scan: |X| |G|^2 too large for a dense scan");

    Rng base(opts.seed);
    std::vector<Candidate> best; // kept sorted by ratio, ascending
    BochnerResult result;
    result.samples = opts.samples;
    result.seed = opts.seed;
    result.min_ratio = std::numeric_limits<double>::infinity();

    for (int s = 0; s < opts.samples; ++s) {
        Rng rng = base.split(static_cast<std::uint64_t>(s));
        Candidate cand;
        cand.rho_weights = sample_density_weights(rng, n, opts.density_floor);
        cand.psi = sample_potential(rng, n);
        bool defined = false;
        cand.ratio = ratio_objective(rep, pi, cand.rho_weights, cand.psi, defined);
        if (!defined) continue;
        const auto pos = std::lower_bound(
            best.begin(), best.end(), cand.ratio,
            [](const Candidate& c, double r) { return c.ratio < r; });
        if (pos != best.end() || static_cast<int>(best.size()) < std::max(opts.refine_top, 1))
            best.insert(pos, cand);
        if (static_cast<int>(best.size()) > std::max(opts.refine_top, 1)) best.pop_back();
    }

    if (best.empty()) throw DomainError("bochner_scan: no sample had positive action");

    for (const Candidate& cand : best) {
        const Candidate refined =
            opts.refine_iters > 0 ? refine_candidate(rep, pi, cand, opts) : cand;
        if (refined.ratio < result.min_ratio) {
            result.min_ratio = refined.ratio;
            result.argmin_rho = make_density(pi, refined.rho_weights).rho;
            result.argmin_psi = refined.psi;
        }
    }
    return result;
}

namespace detail {

namespace {

Eigen::MatrixXd symmetrized_generator(const MarkovChain& chain) {
    const Eigen::Index n = chain.Q.rows();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index x = 0; x < n; ++x) {
        const double sx = std::sqrt(chain.pi(x));
        KahanSum row;
        for (Eigen::Index y = 0; y < n; ++y) row.add(chain.Q(x, y));
        for (Eigen::Index y = 0; y < n; ++y) {
            const double neg_l = (x == y ? row.value() : 0.0) - chain.Q(x, y);
            m(x, y) = sx * neg_l / std::sqrt(chain.pi(y));
        }
    }
    return 0.5 * (m + m.transpose()); // exact symmetry up to detailed-balance noise
}

} // namespace

double spectral_gap_dense(const MarkovChain& chain) {
    const Eigen::MatrixXd m = symmetrized_generator(chain);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues(); // ascending, ev(0) ~ 0
    return std::max(ev(1), 0.0);
}

double spectral_gap_iterative(const MarkovChain& chain) {
    const Eigen::MatrixXd m = symmetrized_generator(chain);
    const Eigen::Index n = m.rows();

    // Kernel direction of the conjugated generator.
    Eigen::VectorXd v0(n);
    for (Eigen::Index x = 0; x < n; ++x) v0(x) = std::sqrt(chain.pi(x));
    v0.normalize();

    // Largest eigenvalue of sigma I - M restricted to the complement of v0
    // gives sigma - gap; sigma from Gershgorin bounds lambda_max(M).
    double sigma = 0.0;
    for (Eigen::Index x = 0; x < n; ++x)
        sigma = std::max(sigma, m(x, x) + (m.row(x).cwiseAbs().sum() - std::abs(m(x, x))));

    const int max_steps = std::min<Eigen::Index>(n - 1, 400);
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;

    Rng rng(0x5eedULL);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    v -= v0.dot(v) * v0;
    v.normalize();

    double previous = -1.0;
    for (int j = 0; j < max_steps; ++j) {
        basis.push_back(v);
        Eigen::VectorXd w = sigma * v - m * v;
        w -= v0.dot(w) * v0;
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (j > 0) w -= beta.back() * basis[static_cast<std::size_t>(j - 1)];
        for (const auto& b : basis) w -= b.dot(w) * b; // full reorthogonalization
        const double nb = w.norm();

        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(j + 1, j + 1);
        for (int i = 0; i <= j; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i > 0) {
                t(i, i - 1) = beta[static_cast<std::size_t>(i - 1)];
                t(i - 1, i) = beta[static_cast<std::size_t>(i - 1)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(t, Eigen::EigenvaluesOnly);
        const double top = small.eigenvalues()(j);
        if (j > 2 && std::abs(top - previous) < 1e-10 * std::max(1.0, std::abs(top)))
            return std::max(sigma - top, 0.0);
        previous = top;

        if (nb < 1e-13) return std::max(sigma - top, 0.0);
        beta.push_back(nb);
        v = w / nb;
    }
    return std::max(sigma - previous, 0.0);
}

} // namespace detail

double spectral_gap(const MarkovChain& chain) {
    return chain.Q.rows() <= kDenseEigenLimit ? detail::spectral_gap_dense(chain)
                                              : detail::spectral_gap_iterative(chain);
}

double mlsi_scan(const MarkovChain& chain, int samples, std::uint64_t seed) {
    Rng base(seed);
    const Eigen::Index n = chain.Q.rows();
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Rng rng = base.split(static_cast<std::uint64_t>(s));
        const Density rho = make_density(chain.pi, sample_density_weights(rng, n, 1e-6));
        const double h = entropy(chain, rho);
        if (h < kEntropyCutoff) continue;
        Eigen::VectorXd logrho(n);
        for (Eigen::Index x = 0; x < n; ++x) logrho(x) = std::log(rho.rho(x));
        best = std::min(best, dirichlet(chain, rho.rho, logrho) / (2.0 * h));
    }
    return best;
}

double ced_check(const MarkovChain& chain, double kappa, int samples, std::uint64_t seed) {
    Rng base(seed);
    const Eigen::Index n = chain.Q.rows();
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Rng rng = base.split(static_cast<std::uint64_t>(s));
        const Density rho = make_density(chain.pi, sample_density_weights(rng, n, 1e-6));
        Eigen::VectorXd logrho(n);
        for (Eigen::Index x = 0; x < n; ++x) logrho(x) = std::log(rho.rho(x));
        const double production = ced_production(chain, rho);
        const double dissipation = dirichlet(chain, rho.rho, logrho);
        best = std::min(best, production - kappa * dissipation);
    }
    return best;
}

VerificationReport verify_certificate(const MarkovChain& chain, const MappingRep& rep,
                                      double kappa, const ScanOptions& opts) {
    VerificationReport report;
    report.kappa = kappa;
    report.seed = opts.seed;
    report.rng = kRngName;

    const BochnerResult bochner = bochner_scan(rep, chain.pi, opts);
    report.min_ratio = bochner.min_ratio;
    report.argmin_rho = bochner.argmin_rho;
    report.argmin_psi = bochner.argmin_psi;
    report.samples = bochner.samples;

    report.spectral_gap = spectral_gap(chain);
    report.mlsi_min_ratio = mlsi_scan(chain, opts.samples, opts.seed);
    report.ced_min_gap = ced_check(chain, kappa, opts.samples, opts.seed);

    report.bochner_ok = report.min_ratio >= kappa - 1e-8;
    report.gap_ok = report.spectral_gap >= kappa - 1e-9;
    report.mlsi_ok = report.mlsi_min_ratio >= kappa - 1e-8;
    report.ced_ok = report.ced_min_gap >= -1e-8;
    return report;
}

} // namespace curvlab
