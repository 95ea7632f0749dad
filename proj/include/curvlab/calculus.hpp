#pragma once

#include "curvlab/chain.hpp"

#include <Eigen/Dense>

namespace curvlab {

using Potential = Eigen::VectorXd;

/// Probability density w.r.t. pi: rho > 0 and sum rho(x) pi(x) = 1.
struct Density {
    Eigen::VectorXd rho;
    bool strictly_positive = true;
};

/// Normalizes positive weights into a density w.r.t. pi.
Density make_density(const Eigen::VectorXd& pi, const Eigen::VectorXd& weights);

/// Throws DomainError unless rho is strictly positive and pi-normalized
/// within tolerance.
void check_density(const Eigen::VectorXd& pi, const Density& rho);

/// Relative entropy H(rho) = sum pi rho log rho.
double entropy(const MarkovChain& chain, const Density& rho);

/// Dirichlet form E(psi, phi) = 1/2 sum (psi(y)-psi(x))(phi(y)-phi(x)) Q(x,y) pi(x).
double dirichlet(const MarkovChain& chain, const Potential& psi, const Potential& phi);

/// Action A(rho,psi) = 1/2 sum (grad_d psi)^2 theta(rho(x), rho(dx)) c(x,d) pi(x).
double action_A(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                const Potential& psi);

/// One summand of the Hessian form:
///   B(x,d,e) = 1/2 (grad_d psi(x))^2 d1theta(rho(x),rho(dx)) (rho(ex)-rho(x))
///            + grad_d psi(x) grad_e psi(x) theta(rho(x),rho(dx)).
double b_term(const MappingRep& rep, const Density& rho, const Potential& psi, std::int32_t x,
              int delta, int eta);

/// Hessian of the entropy: B(rho,psi) = sum B(x,d,e) c(x,d) c(x,e) pi(x),
/// accumulated with compensated summation in index order.
double hessian_B(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                 const Potential& psi);

/// Slow two-line form of the Hessian (the unsimplified expression); kept as an
/// independent oracle behind the --oracle-b flag.
double hessian_B_oracle(const MappingRep& rep, const Eigen::VectorXd& pi, const Density& rho,
                        const Potential& psi);

/// Generator applied to a potential: (L psi)(x) = sum_d (psi(dx)-psi(x)) c(x,d).
Potential generator_apply(const MappingRep& rep, const Potential& psi);

/// Same through the rate matrix Q.
Potential generator_apply(const MarkovChain& chain, const Potential& psi);

/// Convex-entropy-decay production term sum [L rho L log rho + (L rho)^2/rho] pi.
/// This is the second time derivative of the entropy along the heat flow and
/// equals 2 B(rho, log rho).
double ced_production(const MarkovChain& chain, const Density& rho);

} // namespace curvlab
