#include "curvlab/criteria.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace curvlab {

namespace {

constexpr double kRateEqRtol = 1e-12; // rates compared as equal within this

bool rates_equal(double a, double b) {
    return std::abs(a - b) <= kRateEqRtol * std::max(std::abs(a), std::abs(b));
}

// lambda bracket at (x,d): c(x,d) - 1_{d != d^-1} c(dx,d)
//   - sum_{e != d, d^-1} (q - q*)(dx, d^-1, e) / (c(x,d) pi(x)).
double lambda_bracket(const MappingRep& rep, const Eigen::VectorXd& pi, const QTable& table,
                      Eigen::Index x, int d) {
    const double c = rep.rates(x, d);
    const int dinv = rep.inverse(d);
    const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
    double bracket = c;
    if (dinv != d) bracket -= rep.rate(dx, d);
    KahanSum corr;
    for (int e = 0; e < rep.n_moves(); ++e) {
        if (e == d || e == dinv) continue;
        const double q = table.q(dx, dinv, e);
        if (q == 0.0) continue;
        corr.add(q - table.qstar(dx, dinv, e));
    }
    return bracket - corr.value() / (c * pi(x));
}

struct LambdaScan {
    double lambda = std::numeric_limits<double>::infinity();
    Eigen::Index argmin_x = 0;
    int argmin_move = 0;
    bool any = false;
};

LambdaScan scan_lambda(const MappingRep& rep, const Eigen::VectorXd& pi,
                       const std::vector<int>& move_ids) {
    const QTable table(rep, pi);
    LambdaScan scan;
    for (Eigen::Index x = 0; x < rep.n_states(); ++x) {
        for (int d : move_ids) {
            if (!(rep.rates(x, d) > 0.0)) continue;
            const double b = lambda_bracket(rep, pi, table, x, d);
            if (!scan.any || b < scan.lambda) {
                scan.lambda = b;
                scan.argmin_x = x;
                scan.argmin_move = d;
            }
            scan.any = true;
        }
    }
    return scan;
}

std::vector<int> all_move_ids(const MappingRep& rep) {
    std::vector<int> ids(static_cast<std::size_t>(rep.n_moves()));
    for (int d = 0; d < rep.n_moves(); ++d) ids[static_cast<std::size_t>(d)] = d;
    return ids;
}

} // namespace

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::Lambda: return "lambda";
        case Criterion::SplitLambda: return "split_lambda";
        case Criterion::EpsilonCorollary: return "epsilon_corollary";
        case Criterion::CayleyEpsilon: return "cayley_epsilon";
        case Criterion::CayleyInvolutive: return "cayley_involutive";
        case Criterion::GammaNumeric: return "gamma_numeric";
    }
    return "unknown";
}

double QTable::qstar(std::int32_t x, int d, int e) const {
    const int dinv = rep_->inverse(d);
    if (e == d || e == dinv)
        throw UndefinedQStar("q* is undefined for eta in {delta, delta^-1}");
    const int einv = rep_->inverse(e);
    const std::int32_t dx = rep_->apply(d, x);
    const std::int32_t ex = rep_->apply(e, x);
    const std::int32_t dex = rep_->apply(d, ex);
    const double a = q(x, d, e);
    const double b = q(dx, dinv, e);
    const double c = q(ex, d, einv);
    const double f = q(dex, dinv, einv);
    return std::min(std::min(a, b), std::min(c, f));
}

double min_positive_rate(const MappingRep& rep) {
    double cstar = std::numeric_limits<double>::infinity();
    for (Eigen::Index x = 0; x < rep.n_states(); ++x)
        for (int d = 0; d < rep.n_moves(); ++d)
            if (rep.rates(x, d) > 0.0) cstar = std::min(cstar, rep.rates(x, d));
    return cstar;
}

CurvatureCertificate lambda_criterion(const MappingRep& rep, const Eigen::VectorXd& pi,
                                      bool strict) {
    CurvatureCertificate cert;
    cert.criterion = Criterion::Lambda;
    cert.intermediates["c_star"] = min_positive_rate(rep);

    const CommutativityReport comm = commutativity_report(rep);
    if (!comm.essentially_commutative) {
        if (strict) throw NotCommutative("lambda criterion needs a commutative representation");
        cert.note = "representation does not commute on positive-rate pairs";
        return cert;
    }

    const LambdaScan scan = scan_lambda(rep, pi, all_move_ids(rep));
    cert.intermediates["lambda"] = scan.lambda;
    cert.intermediates["argmin_x"] = static_cast<double>(scan.argmin_x);
    cert.intermediates["argmin_move"] = static_cast<double>(scan.argmin_move);
    if (scan.lambda >= 0.0) {
        cert.valid = true;
        cert.bound = 2.0 * scan.lambda;
    } else {
        cert.note = "lambda < 0: criterion hypothesis fails";
    }
    return cert;
}

CurvatureCertificate split_lambda_criterion(const MappingRep& rep, const Eigen::VectorXd& pi,
                                            const std::vector<int>& h1,
                                            const std::vector<int>& h2) {
    const int m = rep.n_moves();
    const std::set<int> s1(h1.begin(), h1.end());
    const std::set<int> s2(h2.begin(), h2.end());
    for (int d : s1)
        if (s2.count(d)) throw BadSplit("H1 and H2 must be disjoint");
    auto covers = [&](const std::set<int>& h) {
        std::set<int> closure = h;
        for (int d : h) {
            if (d < 0 || d >= m) throw BadSplit("move id out of range");
            closure.insert(rep.inverse(d));
        }
        return static_cast<int>(closure.size()) == m;
    };
    if (!covers(s1) || !covers(s2))
        throw BadSplit("each H_i together with its inverses must cover the move set");

    CurvatureCertificate cert;
    cert.criterion = Criterion::SplitLambda;
    cert.intermediates["c_star"] = min_positive_rate(rep);

    const CommutativityReport comm = commutativity_report(rep);
    if (!comm.essentially_commutative) {
        cert.note = "representation does not commute on positive-rate pairs";
        return cert;
    }

    const LambdaScan all = scan_lambda(rep, pi, all_move_ids(rep));
    const LambdaScan l1 = scan_lambda(rep, pi, std::vector<int>(s1.begin(), s1.end()));
    const LambdaScan l2 = scan_lambda(rep, pi, std::vector<int>(s2.begin(), s2.end()));
    cert.intermediates["lambda"] = all.lambda;
    cert.intermediates["lambda1"] = l1.lambda;
    cert.intermediates["lambda2"] = l2.lambda;
    if (all.lambda >= 0.0) {
        cert.valid = true;
        cert.bound = 0.5 * (l1.lambda + l2.lambda);
    } else {
        cert.note = "lambda < 0: criterion hypothesis fails";
    }
    return cert;
}

CurvatureCertificate epsilon_corollary(const MappingRep& rep, const Eigen::VectorXd& pi) {
    const int m = rep.n_moves();
    for (int d = 0; d < m; ++d)
        if (rep.inverse(d) != d)
            throw NotInvolutive("epsilon corollary requires delta = delta^-1 for every move");

    CurvatureCertificate cert;
    cert.criterion = Criterion::EpsilonCorollary;
    const double cstar = min_positive_rate(rep);
    cert.intermediates["c_star"] = cstar;

    // The corollary relaxes the lambda criterion, so it inherits the
    // commutativity assumption.
    if (!commutativity_report(rep).essentially_commutative) {
        cert.note = "representation does not commute on positive-rate pairs";
        return cert;
    }

    const Eigen::Index n = rep.n_states();
    const QTable table(rep, pi);

    // Soundness guard: a pair with q > 0 but q* = 0 admits no finite alpha.
    for (Eigen::Index x = 0; x < n; ++x)
        for (int d = 0; d < m; ++d)
            for (int e = 0; e < m; ++e) {
                if (e == d) continue;
                if (table.q(static_cast<std::int32_t>(x), d, e) > 0.0 &&
                    table.qstar(static_cast<std::int32_t>(x), d, e) == 0.0) {
                    cert.note = "q > 0 with q* = 0: rate support is not move-invariant";
                    return cert;
                }
            }

    // N = number of unordered move pairs whose rates fail to be homogeneous.
    int n_pairs = 0;
    for (int d = 0; d < m; ++d) {
        for (int e = d + 1; e < m; ++e) {
            bool homogeneous = true;
            for (Eigen::Index x = 0; x < n && homogeneous; ++x) {
                const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
                const std::int32_t ex = rep.apply(e, static_cast<std::int32_t>(x));
                if (!rates_equal(rep.rate(dx, e), rep.rates(x, e)) ||
                    !rates_equal(rep.rate(ex, d), rep.rates(x, d)))
                    homogeneous = false;
            }
            if (!homogeneous) ++n_pairs;
        }
    }

    double alpha = 0.0;
    double beta = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int e = 0; e < m; ++e) {
            const double ce = rep.rates(x, e);
            if (ce > 0.0) {
                for (int d = 0; d < m; ++d) {
                    const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
                    const double moved = rep.rate(dx, e);
                    if (moved > 0.0) alpha = std::max(alpha, std::log(moved / ce));
                }
            }
            if (rep.rates(x, e) > 0.0)
                for (int f = 0; f < m; ++f)
                    beta = std::max(beta, rep.rates(x, f) / rep.rates(x, e));
        }
    }

    const double eps = beta * static_cast<double>(n_pairs) * (std::exp(2.0 * alpha) - 1.0);
    cert.intermediates["N"] = static_cast<double>(n_pairs);
    cert.intermediates["alpha"] = alpha;
    cert.intermediates["beta"] = beta;
    cert.intermediates["epsilon"] = eps;
    if (eps <= 1.0) {
        cert.valid = true;
        cert.bound = (1.0 - eps) * 2.0 * cstar;
    } else {
        cert.note = "epsilon > 1: corollary hypothesis fails";
    }
    return cert;
}

CurvatureCertificate cayley_epsilon(const MappingRep& rep, const Eigen::VectorXd& pi,
                                    const GroupTable& group,
                                    const std::vector<int>& generator_elements) {
    (void)pi; // rates already carry the walk; pi is uniform for these models
    const int order = group.size();
    const int m = rep.n_moves();
    if (order > 10000) throw TooLarge("group order above 10^4");
    if (static_cast<int>(generator_elements.size()) != m)
        throw BadParams("one generator element per move expected");
    if (rep.n_states() != order) throw BadParams("state space must be the group itself");

    // Moves must act by left translation of their generator elements.
    for (int d = 0; d < m; ++d) {
        const int g = generator_elements[static_cast<std::size_t>(d)];
        for (int x = 0; x < order; ++x)
            if (rep.moves[static_cast<std::size_t>(d)].to[static_cast<std::size_t>(x)] !=
                group.mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(x)])
                throw BadParams("move " + std::to_string(d) +
                                " is not the left translation of its generator");
    }

    // Generator set closed under inverse and conjugation; membership is
    // resolved by comparing group elements, not move ids.
    std::vector<int> elem_to_move(static_cast<std::size_t>(order), -1);
    for (int d = 0; d < m; ++d) {
        const int g = generator_elements[static_cast<std::size_t>(d)];
        if (elem_to_move[static_cast<std::size_t>(g)] != -1)
            throw BadParams("duplicate generator element");
        elem_to_move[static_cast<std::size_t>(g)] = d;
    }
    for (int d = 0; d < m; ++d) {
        const int g = generator_elements[static_cast<std::size_t>(d)];
        const int ginv = group.inverse[static_cast<std::size_t>(g)];
        if (elem_to_move[static_cast<std::size_t>(ginv)] == -1)
            throw NotConjugacyInvariant("generator set is not closed under inverses at move " +
                                        std::to_string(d));
    }
    // conj_move[d][e] = move id of delta_d delta_e delta_d^-1.
    std::vector<std::vector<int>> conj_move(static_cast<std::size_t>(m),
                                            std::vector<int>(static_cast<std::size_t>(m), -1));
    for (int g = 0; g < order; ++g) {
        const int ginv = group.inverse[static_cast<std::size_t>(g)];
        for (int e = 0; e < m; ++e) {
            const int h = generator_elements[static_cast<std::size_t>(e)];
            const int conj = group.mult[static_cast<std::size_t>(
                group.mult[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)])]
                                       [static_cast<std::size_t>(ginv)];
            if (elem_to_move[static_cast<std::size_t>(conj)] == -1)
                throw NotConjugacyInvariant("conjugating generator " + std::to_string(e) +
                                            " by group element " + std::to_string(g) +
                                            " leaves the generator set");
            const int dmove = elem_to_move[static_cast<std::size_t>(g)];
            if (dmove != -1) conj_move[static_cast<std::size_t>(dmove)][static_cast<std::size_t>(e)] =
                elem_to_move[static_cast<std::size_t>(conj)];
        }
    }

    CurvatureCertificate cert;
    const double cstar = min_positive_rate(rep);
    cert.intermediates["c_star"] = cstar;
    cert.intermediates["n_generators"] = static_cast<double>(m);

    for (Eigen::Index x = 0; x < rep.n_states(); ++x)
        for (int d = 0; d < m; ++d)
            if (!(rep.rates(x, d) > 0.0)) {
                cert.criterion = Criterion::CayleyEpsilon;
                cert.note = "cayley criterion requires strictly positive rates";
                return cert;
            }

    bool involutive = true;
    for (int d = 0; d < m; ++d)
        if (rep.inverse(d) != d) involutive = false;

    double alpha1 = 0.0;
    bool alpha1_any = false;
    double alpha2 = 0.0;
    double beta = 0.0;
    for (int x = 0; x < order; ++x) {
        for (int d = 0; d < m; ++d) {
            const std::int32_t dx = rep.apply(d, x);
            if (rep.inverse(d) != d) {
                const double r = std::log(rep.rates(dx, d) / rep.rates(x, d));
                alpha1 = alpha1_any ? std::max(alpha1, r) : r;
                alpha1_any = true;
            }
            for (int e = 0; e < m; ++e) {
                beta = std::max(beta, rep.rates(x, e) / rep.rates(x, d));
                if (e == d || e == rep.inverse(d)) continue;
                // here d plays the role of the moving map and e the observed one
                const double base = rep.rates(x, e);
                alpha2 = std::max(alpha2, std::log(rep.rates(dx, e) / base));
                const int ce = conj_move[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)];
                alpha2 = std::max(alpha2, std::log(rep.rates(dx, ce) / base));
            }
        }
    }

    cert.intermediates["alpha2"] = alpha2;
    cert.intermediates["beta"] = beta;
    double eps;
    if (involutive) {
        cert.criterion = Criterion::CayleyInvolutive;
        eps = beta * static_cast<double>(m - 1) * (std::exp(2.0 * alpha2) - 1.0);
        cert.intermediates["epsilon_prime"] = eps;
    } else {
        cert.criterion = Criterion::CayleyEpsilon;
        cert.intermediates["alpha1"] = alpha1_any ? alpha1 : 0.0;
        eps = std::exp(alpha1_any ? alpha1 : 0.0) +
              beta * static_cast<double>(m - 2) * (std::exp(2.0 * alpha2) - 1.0);
        cert.intermediates["epsilon"] = eps;
    }
    if (eps <= 1.0) {
        cert.valid = true;
        cert.bound = (1.0 - eps) * 2.0 * cstar;
    } else {
        cert.note = "epsilon > 1: criterion hypothesis fails";
    }
    return cert;
}

AdmissibleR AdmissibleR::zeros(Eigen::Index n_states, int n_moves) {
    AdmissibleR r;
    r.n_states = n_states;
    r.n_moves = n_moves;
    r.values.assign(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_moves) *
                        static_cast<std::size_t>(n_moves),
                    0.0);
    return r;
}

void check_admissible(const MappingRep& rep, const Eigen::VectorXd& pi, const AdmissibleR& r) {
    (void)pi;
    if (r.n_states != rep.n_states() || r.n_moves != rep.n_moves())
        throw InadmissibleR("shape", "R table does not match the representation");
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int d = 0; d < m; ++d) {
            const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
            for (int e = 0; e < m; ++e) {
                const double v = r(x, d, e);
                if (v < 0.0 || !std::isfinite(v))
                    throw InadmissibleR("nonnegativity", "R must be finite and >= 0");
                const std::int32_t ex = rep.apply(e, static_cast<std::int32_t>(x));
                if (v > 0.0) {
                    if (dx == kOutside || ex == kOutside)
                        throw InadmissibleR("support",
                                            "R positive on a move leaving the physical set");
                    if (rep.apply(d, ex) != rep.apply(e, dx))
                        throw InadmissibleR("(i)", "R positive on a non-commuting pair");
                }
                if (rep.rates(x, d) > 0.0 && rep.rates(x, e) > 0.0) {
                    if (!rel_close(v, r(x, e, d), 1e-12, 1e-300))
                        throw InadmissibleR("(ii)", "R not symmetric in (delta, eta)");
                    if (!rel_close(v, r(dx, rep.inverse(d), e), 1e-12, 1e-300))
                        throw InadmissibleR("(iii)", "R not invariant under (x,d)->(dx,d^-1)");
                }
            }
        }
    }
}

double gamma_lower_bound(const MappingRep& rep, const Eigen::VectorXd& pi, const AdmissibleR& r,
                         const Density& rho, const Potential& psi) {
    check_admissible(rep, pi, r);
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    KahanSum total;
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int d = 0; d < m; ++d) {
            const double cd = rep.rates(x, d);
            for (int e = 0; e < m; ++e) {
                const double q = cd * rep.rates(x, e) * pi(x);
                const double gamma = q - r(x, d, e);
                if (gamma == 0.0) continue;
                total.add(gamma * b_term(rep, rho, psi, static_cast<std::int32_t>(x), d, e));
            }
        }
    }
    return total.value();
}

AdmissibleR lambda_criterion_R(const MappingRep& rep, const Eigen::VectorXd& pi) {
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    const QTable table(rep, pi);
    AdmissibleR r = AdmissibleR::zeros(n, m);

    for (Eigen::Index x = 0; x < n; ++x) {
        for (int d = 0; d < m; ++d) {
            const int dinv = rep.inverse(d);
            const double cd = rep.rates(x, d);
            const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
            if (dinv != d && cd > 0.0 && rep.rate(dx, d) > cd * (1.0 + kRateEqRtol))
                throw HypothesisFailed("c(dx,d) > c(x,d) for non-involutive move " +
                                       std::to_string(d));
            for (int e = 0; e < m; ++e) {
                double value = 0.0;
                if (e == d) {
                    // diagonal: q(x,d,d) c(dx,d)/c(x,d) for d != d^-1, else zero
                    if (dinv != d && cd > 0.0)
                        value = table.q(static_cast<std::int32_t>(x), d, d) * rep.rate(dx, d) / cd;
                } else if (e == dinv) {
                    value = table.q(static_cast<std::int32_t>(x), d, e);
                } else {
                    value = table.qstar(static_cast<std::int32_t>(x), d, e);
                }
                if (value > 0.0) {
                    // clause (i): support restricted to pointwise commuting pairs
                    const std::int32_t ex = rep.apply(e, static_cast<std::int32_t>(x));
                    if (dx == kOutside || ex == kOutside ||
                        rep.apply(d, ex) != rep.apply(e, dx))
                        value = 0.0;
                }
                r.at(x, d, e) = value;
            }
        }
    }
    return r;
}

} // namespace curvlab
