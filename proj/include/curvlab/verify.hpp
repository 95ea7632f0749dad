#pragma once

#include "curvlab/calculus.hpp"
#include "curvlab/chain.hpp"

#include <cstdint>
#include <string>

namespace curvlab {

struct ScanOptions {
    int samples = 2000;
    std::uint64_t seed = 20160519; // default stream
    int refine_top = 10;           // best candidates refined by coordinate descent
    int refine_iters = 200;
    double density_floor = 1e-6;
    double refine_floor = 1e-9; // refinement may probe closer to the boundary
};

struct BochnerResult {
    double min_ratio = 0.0; // empirical inf B/A
    Eigen::VectorXd argmin_rho;
    Eigen::VectorXd argmin_psi;
    int samples = 0;
    std::uint64_t seed = 0;
};

/// Random (rho, psi) scan of the Bochner ratio B/A with greedy refinement of
/// the best candidates. Deterministic for a fixed seed: every sample draws
/// from its own split stream, so the minimum over the first k samples does
/// not depend on the total sample count.
BochnerResult bochner_scan(const MappingRep& rep, const Eigen::VectorXd& pi,
                           const ScanOptions& opts);

/// Smallest nonzero eigenvalue of -L in the pi-weighted inner product,
/// computed from the symmetric conjugation D^{1/2} (-L) D^{-1/2}. Dense solve
/// up to 5000 states, deflated Lanczos above.
double spectral_gap(const MarkovChain& chain);

namespace detail {
double spectral_gap_dense(const MarkovChain& chain);
double spectral_gap_iterative(const MarkovChain& chain);
} // namespace detail

/// min over sampled densities of E(rho, log rho) / (2 H(rho)).
double mlsi_scan(const MarkovChain& chain, int samples, std::uint64_t seed);

/// min over sampled densities of the convex-entropy-decay slack
///   sum [L rho L log rho + (L rho)^2 / rho] pi - kappa E(rho, log rho).
double ced_check(const MarkovChain& chain, double kappa, int samples, std::uint64_t seed);

struct VerificationReport {
    double kappa = 0.0; // certified bound the checks ran against
    double min_ratio = 0.0;
    Eigen::VectorXd argmin_rho;
    Eigen::VectorXd argmin_psi;
    int samples = 0;
    double spectral_gap = 0.0;
    double mlsi_min_ratio = 0.0;
    double ced_min_gap = 0.0;
    std::uint64_t seed = 0;
    std::string rng;

    bool bochner_ok = false; // min_ratio >= kappa - 1e-8
    bool gap_ok = false;     // spectral_gap >= kappa - 1e-9
    bool mlsi_ok = false;    // mlsi_min_ratio >= kappa - 1e-8
    bool ced_ok = false;     // ced_min_gap >= -1e-8

    bool all_ok() const { return bochner_ok && gap_ok && mlsi_ok && ced_ok; }
};

/// Runs all checks against a certified lower bound kappa.
VerificationReport verify_certificate(const MarkovChain& chain, const MappingRep& rep,
                                      double kappa, const ScanOptions& opts);

} // namespace curvlab
