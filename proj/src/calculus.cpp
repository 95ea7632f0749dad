#include "curvlab/calculus.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"

#include <cmath>

namespace curvlab {

Density make_density(const Eigen::VectorXd& pi, const Eigen::VectorXd& weights) {
    if (weights.size() != pi.size()) throw DomainError("density weight size mismatch");
    KahanSum mass;
    for (Eigen::Index x = 0; x < pi.size(); ++x) {
        if (!(weights(x) > 0.0) || !std::isfinite(weights(x)))
            throw DomainError("density weights must be strictly positive and finite");
        mass.add(weights(x) * pi(x));
    }
    Density rho;
    rho.rho = weights / mass.value();
    rho.strictly_positive = true;
    return rho;
}

void check_density(const Eigen::VectorXd& pi, const Density& rho) {
    if (rho.rho.size() != pi.size()) throw DomainError("density size mismatch");
    KahanSum mass;
    for (Eigen::Index x = 0; x < pi.size(); ++x) {
        if (!(rho.rho(x) > 0.0)) throw DomainError("density not strictly positive");
        mass.add(rho.rho(x) * pi(x));
    }
    if (std::abs(mass.value() - 1.0) > 1e-9)
        throw DomainError("density not normalized against pi");
}

double entropy(const MarkovChain& chain, const Density& rho) {
    KahanSum h;
    for (Eigen::Index x = 0; x < chain.pi.size(); ++x) {
        const double r = rho.rho(x);
        if (!(r > 0.0)) throw DomainError("entropy: density must be strictly positive");
        h.add(chain.pi(x) * r * std::log(r));
    }
    return h.value();
}

double dirichlet(const MarkovChain& chain, const Potential& psi, const Potential& phi) {
    const Eigen::Index n = chain.Q.rows();
    KahanSum e;
    for (Eigen::Index x = 0; x < n; ++x) {
        for (Eigen::Index y = 0; y < n; ++y) {
            const double q = chain.Q(x, y);
            if (q == 0.0) continue;
            e.add(0.5 * (psi(y) - psi(x)) * (phi(y) - phi(x)) * q * chain.pi(x));
        }
    }
    return e.value();
}

double action_A(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                const Potential& psi) {
    const Eigen::Index n = rep.n_states();
    KahanSum a;
    for (Eigen::Index x = 0; x < n; ++x) {
        for (int d = 0; d < rep.n_moves(); ++d) {
            const double c = rep.rates(x, d);
            if (c == 0.0) continue;
            const std::int32_t y = rep.apply(d, static_cast<std::int32_t>(x));
            const double grad = psi(y) - psi(x);
            a.add(0.5 * grad * grad * log_mean(rho.rho(x), rho.rho(y)) * c * pi(x));
        }
    }
    return a.value();
}

double b_term(const MappingRep& rep, const Density& rho, const Potential& psi, std::int32_t x,
              int delta, int eta) {
    const std::int32_t dx = rep.apply(delta, x);
    const std::int32_t ex = rep.apply(eta, x);
    if (x == kOutside || dx == kOutside || ex == kOutside)
        throw DomainError("b_term: move image leaves the physical state set");
    const double rx = rho.rho(x);
    const double rdx = rho.rho(dx);
    const double gd = psi(dx) - psi(x);
    const double ge = psi(ex) - psi(x);
    const double d1 = log_mean_partials(rx, rdx).first;
    return 0.5 * gd * gd * d1 * (rho.rho(ex) - rx) + gd * ge * log_mean(rx, rdx);
}

double hessian_B(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                 const Potential& psi) {
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    KahanSum b;
    for (Eigen::Index x = 0; x < n; ++x) {
        const double rx = rho.rho(x);
        for (int d = 0; d < m; ++d) {
            const double cd = rep.rates(x, d);
            if (cd == 0.0) continue;
            const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
            const double rdx = rho.rho(dx);
            const double gd = psi(dx) - psi(x);
            // Hoisted pair quantities; the eta loop below sums b_term values.
            const double theta = log_mean(rx, rdx);
            const double d1 = log_mean_partials(rx, rdx).first;
            const double half_gd2_d1 = 0.5 * gd * gd * d1;
            const double w = cd * pi(x);
            for (int e = 0; e < m; ++e) {
                const double ce = rep.rates(x, e);
                if (ce == 0.0) continue;
                const std::int32_t ex = rep.apply(e, static_cast<std::int32_t>(x));
                const double term = half_gd2_d1 * (rho.rho(ex) - rx) +
                                    gd * (psi(ex) - psi(x)) * theta;
                b.add(term * w * ce);
            }
        }
    }
    return b.value();
}

double hessian_B_oracle(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                        const Potential& psi) {
    const Eigen::Index n = rep.n_states();
    const int m = rep.n_moves();
    KahanSum b;
    for (Eigen::Index x = 0; x < n; ++x) {
        const double rx = rho.rho(x);
        for (int d = 0; d < m; ++d) {
            const double cd = rep.rates(x, d);
            if (cd == 0.0) continue;
            const std::int32_t dx = rep.apply(d, static_cast<std::int32_t>(x));
            const double rdx = rho.rho(dx);
            const double gd = psi(dx) - psi(x);
            const auto [d1, d2] = log_mean_partials(rx, rdx);
            const double theta = log_mean(rx, rdx);
            const double w = cd * pi(x);
            for (int e = 0; e < m; ++e) {
                const double ce_x = rep.rates(x, e);
                const double ce_dx = rep.rate(dx, e);
                KahanSum term;
                if (ce_x != 0.0) {
                    const std::int32_t ex = rep.apply(e, static_cast<std::int32_t>(x));
                    term.add(gd * gd * d1 * (rho.rho(ex) - rx) * ce_x);
                    term.add(2.0 * gd * (psi(ex) - psi(x)) * theta * ce_x);
                }
                if (ce_dx != 0.0) {
                    const std::int32_t edx = rep.apply(e, dx);
                    term.add(gd * gd * d2 * (rho.rho(edx) - rdx) * ce_dx);
                    term.add(-2.0 * gd * (psi(edx) - psi(dx)) * theta * ce_dx);
                }
                b.add(0.25 * term.value() * w);
            }
        }
    }
    return b.value();
}

Potential generator_apply(const MappingRep& rep, const Potential& psi) {
    const Eigen::Index n = rep.n_states();
    Potential out(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        KahanSum acc;
        for (int d = 0; d < rep.n_moves(); ++d) {
            const double c = rep.rates(x, d);
            if (c == 0.0) continue;
            const std::int32_t y = rep.apply(d, static_cast<std::int32_t>(x));
            acc.add((psi(y) - psi(x)) * c);
        }
        out(x) = acc.value();
    }
    return out;
}

Potential generator_apply(const MarkovChain& chain, const Potential& psi) {
    const Eigen::Index n = chain.Q.rows();
    Potential out(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        KahanSum acc;
        for (Eigen::Index y = 0; y < n; ++y) {
            const double q = chain.Q(x, y);
            if (q == 0.0) continue;
            acc.add((psi(y) - psi(x)) * q);
        }
        out(x) = acc.value();
    }
    return out;
}

double ced_production(const MarkovChain& chain, const Density& rho) {
    const Eigen::Index n = chain.Q.rows();
    Potential logrho(n);
    for (Eigen::Index x = 0; x < n; ++x) {
        if (!(rho.rho(x) > 0.0)) throw DomainError("ced_production: density must be positive");
        logrho(x) = std::log(rho.rho(x));
    }
    const Potential lrho = generator_apply(chain, rho.rho);
    const Potential llog = generator_apply(chain, logrho);
    KahanSum s;
    for (Eigen::Index x = 0; x < n; ++x)
        s.add((lrho(x) * llog(x) + lrho(x) * lrho(x) / rho.rho(x)) * chain.pi(x));
    return s.value();
}

} // namespace curvlab
