#pragma once

#include "curvlab/chain.hpp"
#include "curvlab/criteria.hpp"

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace curvlab {

// ---------------------------------------------------------------------------
// Glauber dynamics for Ising-type spin systems
// ---------------------------------------------------------------------------

/// Coupling matrix k (symmetric, zero diagonal) and inverse temperature.
/// The Hamiltonian is H(x) = -sum_{i,j} k_ij x_i x_j on {-1,1}^n.
struct IsingSpec {
    int n = 0;
    Eigen::MatrixXd k;
    double beta = 0.0;

    void validate() const;
};

struct IsingModel {
    IsingSpec spec;
    StateSpace space;
    MappingRep rep; // n involutive spin flips, c(x,delta_i) = e^{-(beta/2) grad_i H}
    MarkovChain chain;
};

/// Spin convention: bit i set <=> x_i = +1.
double ising_hamiltonian(const IsingSpec& spec, std::uint32_t mask);

/// grad_i H(x) = H(delta_i x) - H(x).
double ising_grad_h(const IsingSpec& spec, std::uint32_t mask, int site);

IsingModel build_ising(const IsingSpec& spec, std::size_t cap = 0);

/// Homogeneous product chain: n independent two-point factors with constant
/// flip rate (the beta = 0 Glauber chain scaled by `rate`).
IsingModel build_hypercube(int n, double rate = 1.0, std::size_t cap = 0);

/// eps(beta) = max_i sum_{j != i} exp(2 beta sum_{m != i,j} |k_im|+|k_jm|)
///             (e^{4 beta |k_ij|} - 1).
double ising_epsilon(const IsingSpec& spec);

/// Display bound for the d-dimensional lattice: (2d-1) e^{2b(2d-1)} (e^{2b}-1).
double lattice_display_epsilon(int d, double beta);

/// Large-n simplification for Curie-Weiss: 2 beta e^{2 beta}.
double cw_simplified_epsilon(double beta);

/// Closed form of eps(beta) for Curie-Weiss couplings k = 1/(2n):
/// (n-1) e^{2 beta (n-2)/n} (e^{2 beta / n} - 1).
double cw_epsilon_closed(int n, double beta);

/// Published closed forms for the minimal rate of these families. They
/// differ from the exact minimum of the built rates; certificates always use
/// the exact value and report both (see README).
double cw_published_cstar(int n, double beta);
double lattice_published_cstar(int d, double beta);

/// Bisection root of eps(beta) = 1 to 1e-8; eps must be increasing on the
/// bracket (checked on a grid). Throws NoRoot when eps stays below 1.
double epsilon_threshold(const std::function<double(double)>& eps, double beta_cap = 64.0);

struct LatticeIsing {
    IsingSpec spec;
    int dim = 0;
    int max_degree = 0;
    std::vector<std::vector<int>> sites;
};

/// Nearest-neighbour couplings 1/2 on a finite connected subset of Z^d.
LatticeIsing build_lattice_ising(const std::vector<std::vector<int>>& sites, double beta);

/// Convenience: all sites of a box given by extents (e.g. {2,3} in Z^2).
std::vector<std::vector<int>> lattice_box(const std::vector<int>& extents);

IsingSpec build_curie_weiss(int n, double beta);

// ---------------------------------------------------------------------------
// Hard-core models
// ---------------------------------------------------------------------------

using Config = std::vector<int>;

/// Site set T with intensities nu and a decreasing allowed set A given by a
/// membership predicate; A is enumerated on build.
struct HardCoreSpec {
    int n_sites = 0;
    std::vector<double> nu;
    std::function<bool(const Config&)> allowed;
    std::vector<std::string> site_labels; // optional
};

struct HardCoreModel {
    HardCoreSpec spec;
    std::vector<Config> configs; // enumerated A; index == state index
    StateSpace space;
    MappingRep rep; // creation move 2i, annihilation move 2i+1
    MarkovChain chain;
    std::vector<int> creation_moves;
    std::vector<int> annihilation_moves;
    double eps0 = 0.0; // blocking parameters of the split criterion
    double eps1 = 0.0;
};

HardCoreModel build_hardcore(const HardCoreSpec& spec, std::size_t cap = 0);

/// Inner sum of the eps0 definition at a fixed (x, i), evaluated through the
/// membership predicate only (no enumeration of A needed):
///   sum_{j != i} nu(j) 1_{x + 1_j - 1_i in A} 1_{x + 1_j not in A}.
double hardcore_blocking_sum(const HardCoreSpec& spec, const Config& x, int i);

/// Split certificate over the natural halves of a built hard-core model
/// (H1 = creations, H2 = annihilations).
CurvatureCertificate hardcore_split_certificate(const HardCoreModel& model);

/// Occupation model on a simple graph: A = independent sets, nu == rho.
HardCoreSpec build_graph_hardcore(int n_vertices, const std::vector<std::pair<int, int>>& edges,
                                  double rho);

struct RodsInfo {
    int L = 0;
    int k = 0;
    std::vector<std::vector<std::pair<int, int>>> rods; // vertex set per rod
    std::vector<std::vector<char>> conflict;            // pairwise intersection
    int max_conflict_degree = 0;
    int interior_rod = -1; // a rod with the full k^2+4k+1 neighbourhood, if any
};

/// Hard rods of length k (k+1 cells) in {0..L}^2, horizontal and vertical.
/// Two rods conflict when their vertex sets intersect.
std::pair<HardCoreSpec, RodsInfo> build_rods(int L, int k, double rho);

// ---------------------------------------------------------------------------
// Random walks on the symmetric group
// ---------------------------------------------------------------------------

struct CayleyModel {
    GroupTable group;
    std::vector<int> generator_elements; // group element per move
    StateSpace space;
    MappingRep rep; // left translations, constant rate 1/|G|
    MarkovChain chain;
    double rate = 0.0;               // 1 / (enumerated |G_{n,k}|)
    double claimed_rate = 0.0; // 1 / binomial(n,k)
    bool generator_count_matches_claim = true;
    bool generates_full_group = true; // odd k only reaches the alternating group
};

/// Simple random walk generated by all k-cycles of S_n, 1 < k < n <= 7.
/// The state space is the subgroup the cycles generate: all of S_n for even
/// k, the alternating group for odd k (odd cycles are even permutations).
/// |G_{n,k}| is enumerated exactly; the claimed binomial(n,k) count is
/// reported alongside and flagged when it disagrees (it does for k > 2).
CayleyModel build_symmetric_group_walk(int n, int k, std::size_t cap = 0);

CurvatureCertificate cayley_certificate(const CayleyModel& model);

} // namespace curvlab
