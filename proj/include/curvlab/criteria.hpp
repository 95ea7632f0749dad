#pragma once

#include "curvlab/calculus.hpp"
#include "curvlab/chain.hpp"

#include <map>
#include <string>
#include <vector>

namespace curvlab {

/// q(x,d,e) = c(x,d) c(x,e) pi(x) and the four-point minimum q*.
/// Entries referencing states outside the physical set are zero.
class QTable {
  public:
    QTable(const MappingRep& rep, const Eigen::VectorXd& pi) : rep_(&rep), pi_(&pi) {}

    double q(std::int32_t x, int d, int e) const {
        if (x == kOutside) return 0.0;
        return rep_->rates(x, d) * rep_->rates(x, e) * (*pi_)(x);
    }

    /// q*(x,d,e) = min{ q(x,d,e), q(dx,d^-1,e), q(ex,d,e^-1), q(dex,d^-1,e^-1) }.
    /// Only defined for e outside {d, d^-1}.
    double qstar(std::int32_t x, int d, int e) const;

  private:
    const MappingRep* rep_;
    const Eigen::VectorXd* pi_;
};

enum class Criterion {
    Lambda,
    SplitLambda,
    EpsilonCorollary,
    CayleyEpsilon,
    CayleyInvolutive,
    GammaNumeric,
};

const char* criterion_name(Criterion c);

struct CurvatureCertificate {
    Criterion criterion = Criterion::Lambda;
    bool valid = false;   // criterion hypothesis met; bound reported only when true
    double bound = 0.0;
    std::map<std::string, double> intermediates;
    std::string note;
};

/// Minimal positive transition rate c*.
double min_positive_rate(const MappingRep& rep);

/// Perturbative lambda criterion: if
///   lambda = min over c(x,d)>0 of [ c(x,d) - 1_{d != d^-1} c(dx,d)
///            - sum_{e != d,d^-1} (q-q*)(dx,d^-1,e) / (c(x,d) pi(x)) ] >= 0
/// the curvature is bounded below by 2 lambda. Requires the representation to
/// commute on pairs with positive rates; lambda is still reported when the
/// hypothesis fails (valid=false) for diagnostics and beta scans.
CurvatureCertificate lambda_criterion(const MappingRep& rep, const Eigen::VectorXd& pi,
                                      bool strict = false);

/// Split variant: with disjoint H1, H2 covering G up to inverses, the bound
/// improves to (lambda_1 + lambda_2)/2 where lambda_i minimizes over H_i.
CurvatureCertificate split_lambda_criterion(const MappingRep& rep, const Eigen::VectorXd& pi,
                                            const std::vector<int>& h1,
                                            const std::vector<int>& h2);

/// Involutive corollary: with N the number of inhomogeneous move pairs,
/// alpha the worst log rate ratio after a move and beta the worst rate
/// quotient, eps = beta N (e^{2 alpha} - 1) <= 1 certifies (1-eps) 2 c*.
CurvatureCertificate epsilon_corollary(const MappingRep& rep, const Eigen::VectorXd& pi);

/// Group structure backing a Cayley-graph walk: moves act by left translation
/// of the generator elements.
struct GroupTable {
    std::vector<std::vector<int>> mult; // mult[g][h] = g*h
    std::vector<int> inverse;           // group inverse per element
    int identity = 0;

    int size() const { return static_cast<int>(mult.size()); }
};

/// Conjugacy-invariant Cayley criterion (requires strictly positive rates and
/// a generator set closed under inverses and conjugation). Selects the
/// improved involutive branch structurally when every generator is an
/// involution.
CurvatureCertificate cayley_epsilon(const MappingRep& rep, const Eigen::VectorXd& pi,
                                    const GroupTable& group,
                                    const std::vector<int>& generator_elements);

/// Nonnegative table R(x,d,e); admissible when it is supported on commuting
/// pairs, symmetric in (d,e) and invariant under (x,d) -> (dx,d^-1) wherever
/// both rates are positive.
struct AdmissibleR {
    Eigen::Index n_states = 0;
    int n_moves = 0;
    std::vector<double> values; // index (x*m + d)*m + e

    double operator()(Eigen::Index x, int d, int e) const {
        return values[static_cast<std::size_t>((x * n_moves + d) * n_moves + e)];
    }
    double& at(Eigen::Index x, int d, int e) {
        return values[static_cast<std::size_t>((x * n_moves + d) * n_moves + e)];
    }
    static AdmissibleR zeros(Eigen::Index n_states, int n_moves);
};

/// Throws InadmissibleR naming the violated clause.
void check_admissible(const MappingRep& rep, const Eigen::VectorXd& pi, const AdmissibleR& r);

/// Bochner-Bakry-Emery lower bound sum_{x,d,e} Gamma(x,d,e) B(x,d,e) with
/// Gamma = q - R; always <= B(rho,psi) for admissible R, with equality at R=0.
double gamma_lower_bound(const MappingRep& rep, const Eigen::VectorXd& pi, const AdmissibleR& r,
                         const Density& rho, const Potential& psi);

/// The R used in the proof of the lambda criterion: q* off-diagonal, q on
/// inverse pairs and a scaled diagonal for non-involutive moves. Throws
/// HypothesisFailed when c(dx,d) > c(x,d) for some non-involutive move.
AdmissibleR lambda_criterion_R(const MappingRep& rep, const Eigen::VectorXd& pi);

} // namespace curvlab
