#pragma once

#include "curvlab/calculus.hpp"
#include "curvlab/chain.hpp"
#include "curvlab/rng.hpp"

#include <Eigen/Dense>

namespace helpers {

/// Symmetric two-point chain with unit rates.
inline curvlab::MarkovChain two_point_chain() {
    curvlab::MarkovChain chain;
    chain.space = curvlab::StateSpace::indexed(2);
    chain.Q = Eigen::MatrixXd{{0.0, 1.0}, {1.0, 0.0}};
    chain.pi = Eigen::VectorXd{{0.5, 0.5}};
    return chain;
}

/// Dense random reversible chain: symmetric conductances over a random
/// positive measure.
inline curvlab::MarkovChain random_reversible_chain(int n, curvlab::Rng& rng) {
    Eigen::VectorXd pi(n);
    for (int i = 0; i < n; ++i) pi(i) = 0.2 + rng.uniform();
    pi /= pi.sum();
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s(i, j) = s(j, i) = 0.1 + rng.uniform();
    curvlab::MarkovChain chain;
    chain.space = curvlab::StateSpace::indexed(static_cast<std::size_t>(n));
    chain.Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) chain.Q(i, j) = s(i, j) / pi(i);
    chain.pi = pi;
    return chain;
}

inline curvlab::Density random_density(const Eigen::VectorXd& pi, curvlab::Rng& rng,
                                       double floor = 1e-4) {
    Eigen::VectorXd w(pi.size());
    for (Eigen::Index i = 0; i < pi.size(); ++i) w(i) = floor + rng.exponential();
    return curvlab::make_density(pi, w);
}

inline Eigen::VectorXd random_potential(Eigen::Index n, curvlab::Rng& rng) {
    Eigen::VectorXd psi(n);
    for (Eigen::Index i = 0; i < n; ++i) psi(i) = rng.normal();
    return psi;
}

} // namespace helpers
