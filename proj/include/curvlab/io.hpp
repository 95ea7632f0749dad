#pragma once

#include "curvlab/chain.hpp"
#include "curvlab/criteria.hpp"
#include "curvlab/models.hpp"
#include "curvlab/verify.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace curvlab {

using Json = nlohmann::ordered_json;

// Chain/representation document:
//   {"states":[...], "moves":[{"perm":[...], "inverse":k}, ...],
//    "rates":[[...per move...] per state], "pi":[...]}
// "perm" entries of -1 mark images outside the physical set. A "Q" matrix may
// be given instead of moves/rates; the transposition representation is
// derived. pi may be unnormalized.
Json chain_to_json(const StateSpace& space, const MappingRep& rep, const Eigen::VectorXd& pi);

struct ChainDocument {
    StateSpace space;
    MappingRep rep;
    Eigen::VectorXd pi_weights;
};

ChainDocument chain_from_json(const Json& doc);

Json certificate_to_json(const CurvatureCertificate& cert);
CurvatureCertificate certificate_from_json(const Json& doc);

Json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& doc);

/// A model built from a declarative JSON spec. Flags describe which criteria
/// apply; `info` carries model-specific quantities (epsilons, claimed
/// constants, thresholds).
struct BuiltModel {
    std::string type;
    StateSpace space;
    MappingRep rep;
    MarkovChain chain;
    std::optional<IsingSpec> ising;
    std::optional<std::pair<std::vector<int>, std::vector<int>>> natural_split;
    std::optional<CayleyModel> cayley;
    Json info;
};

/// Supported "type" values: ising | curie_weiss | lattice_ising |
/// hardcore_graph | rods | symmetric_group | hypercube | chain.
BuiltModel build_model(const Json& doc, std::size_t cap = 0);

/// Coupling matrix and temperature of an ising/curie_weiss/lattice_ising
/// document, without building the chain (used by beta sweeps).
IsingSpec ising_spec_from_json(const Json& doc);

Json parse_json_file(const std::string& path);
Json parse_json_text(const std::string& text);

/// 17 significant digits: value-preserving text round trip for doubles.
std::string format_double(double v);

} // namespace curvlab
