#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace curvlab {

/// Sentinel index for move images that leave the physical state set.
/// Rates are forced to zero on such pairs, which realizes the enlarged-state
/// convention without materializing the enlarged space.
inline constexpr std::int32_t kOutside = -1;

/// Global cap on the number of states (CURVLAB_STATE_CAP overrides).
std::size_t state_cap();

struct StateSpace {
    std::vector<std::string> labels;

    std::size_t size() const { return labels.size(); }

    /// Anonymous space with labels "s0".."s{n-1}".
    static StateSpace indexed(std::size_t n);

    /// Throws on duplicate labels, fewer than two states, or cap overflow.
    void validate(std::size_t cap = 0) const;
};

/// A bijective move on the (possibly enlarged) state space.
struct Move {
    std::vector<std::int32_t> to; // image per state index, kOutside allowed
    int inverse = -1;             // id of the inverse move

    std::int32_t apply(std::int32_t x) const {
        return x == kOutside ? kOutside : to[static_cast<std::size_t>(x)];
    }
};

/// Mapping representation (G, c): moves plus the |X| x |G| rate table.
struct MappingRep {
    std::vector<Move> moves;
    Eigen::MatrixXd rates; // rates(x, d) = c(x, delta_d)

    Eigen::Index n_states() const { return rates.rows(); }
    int n_moves() const { return static_cast<int>(moves.size()); }

    double rate(std::int32_t x, int d) const {
        return x == kOutside ? 0.0 : rates(x, d);
    }
    std::int32_t apply(int d, std::int32_t x) const { return moves[d].apply(x); }
    int inverse(int d) const { return moves[d].inverse; }
};

struct MarkovChain {
    StateSpace space;
    Eigen::MatrixXd Q;  // nonnegative rates, zero diagonal
    Eigen::VectorXd pi; // strictly positive, sums to one
    double normalizer = 1.0; // recorded when pi was ingested unnormalized
};

struct ValidationIssue {
    std::string kind; // "irreducibility", "detailed_balance", ...
    std::string message;
};

struct ValidationReport {
    bool passed = true;
    std::vector<ValidationIssue> issues;
};

struct CommutativityReport {
    struct Witness {
        std::int32_t x;
        int delta;
        int eta;
    };

    bool commutative = true;             // delta(eta x) == eta(delta x) for all x
    bool essentially_commutative = true; // same, restricted to c(x,delta)c(x,eta) > 0
    bool involutive = true;              // delta == delta^{-1} for every move
    std::vector<Witness> witnesses;      // strict failures (capped sample)
    std::vector<Witness> essential_witnesses;
    std::size_t witness_count = 0;
    std::size_t essential_witness_count = 0;
};

// Tolerances for the reversibility checks. Rates in the example models span
// e^{+-beta n}, so the comparison is relative with a small absolute floor.
inline constexpr double kDetailedBalanceRtol = 1e-10;
inline constexpr double kDetailedBalanceAtol = 1e-14;
inline constexpr double kPiSumTol = 1e-12;

ValidationReport validate_chain(const MarkovChain& chain);

/// Throws InvalidMapping when the representation invariants fail against pi:
/// inverse closure, Def-style inverse property on positive rates, zero rates
/// on outside images, and detailed balance in moved form.
void validate_representation(const MappingRep& rep, const Eigen::VectorXd& pi);

/// Builds the chain generated by a mapping representation. pi may be given
/// unnormalized; the normalizer is recorded on the returned chain.
MarkovChain chain_from_mapping(const StateSpace& space, const MappingRep& rep,
                               const Eigen::VectorXd& pi_weights);

/// The transposition representation: one involutive swap move per edge with
/// positive rate. Reproduces Q bit-exactly under chain_from_mapping.
MappingRep canonical_transposition_representation(const MarkovChain& chain);

/// Exhaustive commutativity / involutivity scan over all (x, delta, eta).
CommutativityReport commutativity_report(const MappingRep& rep);

} // namespace curvlab
