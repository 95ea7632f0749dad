#include "curvlab/io.hpp"

#include "curvlab/errors.hpp"
#include "curvlab/numerics.hpp"
#include "curvlab/rng.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace curvlab {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str());
}

Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

Json chain_to_json(const StateSpace& space, const MappingRep& rep, const Eigen::VectorXd& pi) {
    Json doc;
    doc["type"] = "chain";
    doc["states"] = space.labels;
    Json moves = Json::array();
    for (const Move& mv : rep.moves) {
        Json m;
        m["perm"] = mv.to;
        m["inverse"] = mv.inverse;
        moves.push_back(std::move(m));
    }
    doc["moves"] = std::move(moves);
    Json rates = Json::array();
    for (Eigen::Index x = 0; x < rep.n_states(); ++x) {
        Json row = Json::array();
        for (int d = 0; d < rep.n_moves(); ++d) row.push_back(rep.rates(x, d));
        rates.push_back(std::move(row));
    }
    doc["rates"] = std::move(rates);
    Json pis = Json::array();
    for (Eigen::Index x = 0; x < pi.size(); ++x) pis.push_back(pi(x));
    doc["pi"] = std::move(pis);
    return doc;
}

namespace {

Eigen::VectorXd vector_from_json(const Json& arr, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string(what) + " must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& x : arr) v(i++) = x.get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const Json& arr, const char* what) {
    if (!arr.is_array() || arr.empty()) throw ParseError(std::string(what) + " must be a matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(arr.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(arr.front().size());
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index r = 0;
    for (const auto& row : arr) {
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(std::string(what) + " has ragged rows");
        Eigen::Index c = 0;
        for (const auto& x : row) m(r, c++) = x.get<double>();
        ++r;
    }
    return m;
}

} // namespace

ChainDocument chain_from_json(const Json& doc) {
    ChainDocument out;
    if (!doc.contains("states")) throw ParseError("chain document needs \"states\"");
    out.space.labels = doc.at("states").get<std::vector<std::string>>();
    out.space.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(out.space.size());

    if (!doc.contains("pi")) throw ParseError("chain document needs \"pi\"");
    out.pi_weights = vector_from_json(doc.at("pi"), "pi");
    if (out.pi_weights.size() != n) throw ParseError("pi length does not match states");

    if (doc.contains("moves")) {
        if (!doc.contains("rates")) throw ParseError("moves given without rates");
        for (const auto& m : doc.at("moves")) {
            Move mv;
            mv.to.clear();
            for (const auto& t : m.at("perm")) mv.to.push_back(t.get<std::int32_t>());
            if (static_cast<Eigen::Index>(mv.to.size()) != n)
                throw ParseError("move permutation length does not match states");
            mv.inverse = m.at("inverse").get<int>();
            out.rep.moves.push_back(std::move(mv));
        }
        out.rep.rates = matrix_from_json(doc.at("rates"), "rates");
        if (out.rep.rates.rows() != n ||
            out.rep.rates.cols() != static_cast<Eigen::Index>(out.rep.moves.size()))
            throw ParseError("rates table has the wrong shape");
    } else if (doc.contains("Q")) {
        const Eigen::MatrixXd q = matrix_from_json(doc.at("Q"), "Q");
        if (q.rows() != n || q.cols() != n) throw ParseError("Q must be |states| x |states|");
        MarkovChain chain;
        chain.space = out.space;
        chain.Q = q;
        KahanSum z;
        for (Eigen::Index x = 0; x < n; ++x) z.add(out.pi_weights(x));
        chain.pi = out.pi_weights / z.value();
        out.rep = canonical_transposition_representation(chain);
    } else {
        throw ParseError("chain document needs either \"moves\"+\"rates\" or \"Q\"");
    }
    return out;
}

Json certificate_to_json(const CurvatureCertificate& cert) {
    Json doc;
    doc["criterion"] = criterion_name(cert.criterion);
    doc["valid"] = cert.valid;
    if (cert.valid) doc["bound"] = cert.bound; // bound reported only when valid
    Json inter;
    for (const auto& [key, value] : cert.intermediates) inter[key] = value;
    doc["intermediates"] = std::move(inter);
    if (!cert.note.empty()) doc["note"] = cert.note;
    return doc;
}

CurvatureCertificate certificate_from_json(const Json& doc) {
    CurvatureCertificate cert;
    const std::string name = doc.at("criterion").get<std::string>();
    for (Criterion c : {Criterion::Lambda, Criterion::SplitLambda, Criterion::EpsilonCorollary,
                        Criterion::CayleyEpsilon, Criterion::CayleyInvolutive,
                        Criterion::GammaNumeric})
        if (name == criterion_name(c)) cert.criterion = c;
    cert.valid = doc.at("valid").get<bool>();
    if (doc.contains("bound")) cert.bound = doc.at("bound").get<double>();
    for (const auto& [key, value] : doc.at("intermediates").items())
        cert.intermediates[key] = value.get<double>();
    if (doc.contains("note")) cert.note = doc.at("note").get<std::string>();
    return cert;
}

Json report_to_json(const VerificationReport& report) {
    Json doc;
    doc["kappa"] = report.kappa;
    doc["min_ratio"] = report.min_ratio;
    Json rho = Json::array();
    for (Eigen::Index i = 0; i < report.argmin_rho.size(); ++i) rho.push_back(report.argmin_rho(i));
    Json psi = Json::array();
    for (Eigen::Index i = 0; i < report.argmin_psi.size(); ++i) psi.push_back(report.argmin_psi(i));
    doc["argmin_rho"] = std::move(rho);
    doc["argmin_psi"] = std::move(psi);
    doc["samples"] = report.samples;
    doc["spectral_gap"] = report.spectral_gap;
    doc["mlsi_min_ratio"] = report.mlsi_min_ratio;
    doc["ced_min_gap"] = report.ced_min_gap;
    doc["seed"] = report.seed;
    doc["rng"] = report.rng;
    doc["checks"] = Json{{"bochner", report.bochner_ok},
                         {"spectral_gap", report.gap_ok},
                         {"mlsi", report.mlsi_ok},
                         {"ced", report.ced_ok}};
    return doc;
}

VerificationReport report_from_json(const Json& doc) {
    VerificationReport report;
    report.kappa = doc.at("kappa").get<double>();
    report.min_ratio = doc.at("min_ratio").get<double>();
    report.argmin_rho = vector_from_json(doc.at("argmin_rho"), "argmin_rho");
    report.argmin_psi = vector_from_json(doc.at("argmin_psi"), "argmin_psi");
    report.samples = doc.at("samples").get<int>();
    report.spectral_gap = doc.at("spectral_gap").get<double>();
    report.mlsi_min_ratio = doc.at("mlsi_min_ratio").get<double>();
    report.ced_min_gap = doc.at("ced_min_gap").get<double>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.rng = doc.at("rng").get<std::string>();
    const auto& checks = doc.at("checks");
    report.bochner_ok = checks.at("bochner").get<bool>();
    report.gap_ok = checks.at("spectral_gap").get<bool>();
    report.mlsi_ok = checks.at("mlsi").get<bool>();
    report.ced_ok = checks.at("ced").get<bool>();
    return report;
}

namespace {

BuiltModel from_ising_model(IsingModel&& model, const std::string& type) {
    BuiltModel out;
    out.type = type;
    out.space = std::move(model.space);
    out.rep = std::move(model.rep);
    out.chain = std::move(model.chain);
    out.ising = model.spec;
    const double eps = ising_epsilon(*out.ising);
    const double cstar = min_positive_rate(out.rep);
    out.info["epsilon"] = eps;
    out.info["c_star"] = cstar;
    if (eps <= 1.0) out.info["ising_epsilon_bound"] = (1.0 - eps) * 2.0 * cstar;
    return out;
}

} // namespace

IsingSpec ising_spec_from_json(const Json& doc) {
    const std::string type = doc.value("type", "");
    if (type == "ising") {
        IsingSpec spec;
        spec.n = doc.at("n").get<int>();
        spec.beta = doc.at("beta").get<double>();
        spec.k = matrix_from_json(doc.at("k"), "k");
        spec.validate();
        return spec;
    }
    if (type == "curie_weiss")
        return build_curie_weiss(doc.at("n").get<int>(), doc.at("beta").get<double>());
    if (type == "lattice_ising") {
        std::vector<std::vector<int>> sites;
        if (doc.contains("sites"))
            sites = doc.at("sites").get<std::vector<std::vector<int>>>();
        else if (doc.contains("dims"))
            sites = lattice_box(doc.at("dims").get<std::vector<int>>());
        else
            throw ParseError("lattice_ising needs \"sites\" or \"dims\"");
        return build_lattice_ising(sites, doc.at("beta").get<double>()).spec;
    }
    throw ParseError("not a coupling-matrix model: " + type);
}

BuiltModel build_model(const Json& doc, std::size_t cap) {
    if (!doc.contains("type")) throw ParseError("model document needs a \"type\"");
    const std::string type = doc.at("type").get<std::string>();

    if (type == "ising") {
        return from_ising_model(build_ising(ising_spec_from_json(doc), cap), type);
    }
    if (type == "curie_weiss") {
        const int n = doc.at("n").get<int>();
        const double beta = doc.at("beta").get<double>();
        BuiltModel out = from_ising_model(build_ising(ising_spec_from_json(doc), cap), type);
        out.info["epsilon_closed_form"] = cw_epsilon_closed(n, beta);
        out.info["published_c_star"] = cw_published_cstar(n, beta);
        return out;
    }
    if (type == "lattice_ising") {
        const double beta = doc.at("beta").get<double>();
        std::vector<std::vector<int>> sites;
        if (doc.contains("sites"))
            sites = doc.at("sites").get<std::vector<std::vector<int>>>();
        else if (doc.contains("dims"))
            sites = lattice_box(doc.at("dims").get<std::vector<int>>());
        else
            throw ParseError("lattice_ising needs \"sites\" or \"dims\"");
        LatticeIsing lattice = build_lattice_ising(sites, beta);
        BuiltModel out = from_ising_model(build_ising(lattice.spec, cap), type);
        out.info["dim"] = lattice.dim;
        out.info["max_degree"] = lattice.max_degree;
        out.info["epsilon_display_bound"] = lattice_display_epsilon(lattice.dim, beta);
        out.info["published_c_star"] = lattice_published_cstar(lattice.dim, beta);
        return out;
    }
    if (type == "hypercube") {
        const int n = doc.at("n").get<int>();
        const double rate = doc.contains("rate") ? doc.at("rate").get<double>() : 1.0;
        BuiltModel out = from_ising_model(build_hypercube(n, rate, cap), type);
        return out;
    }
    if (type == "hardcore_graph" || type == "rods") {
        HardCoreSpec spec;
        Json info;
        if (type == "hardcore_graph") {
            const int n = doc.at("n_vertices").get<int>();
            std::vector<std::pair<int, int>> edges;
            for (const auto& e : doc.at("edges"))
                edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
            spec = build_graph_hardcore(n, edges, doc.at("rho").get<double>());
        } else {
            auto [rspec, rinfo] = build_rods(doc.at("L").get<int>(), doc.at("k").get<int>(),
                                             doc.at("rho").get<double>());
            spec = std::move(rspec);
            info["n_rods"] = rinfo.rods.size();
            info["max_conflict_degree"] = rinfo.max_conflict_degree;
            info["interior_rod"] = rinfo.interior_rod;
        }
        HardCoreModel model = build_hardcore(spec, cap);
        BuiltModel out;
        out.type = type;
        out.space = model.space;
        out.rep = model.rep;
        out.chain = model.chain;
        out.natural_split = std::make_pair(model.creation_moves, model.annihilation_moves);
        out.info = std::move(info);
        out.info["eps0"] = model.eps0;
        out.info["eps1"] = model.eps1;
        out.info["n_states"] = model.configs.size();
        return out;
    }
    if (type == "symmetric_group") {
        CayleyModel model = build_symmetric_group_walk(doc.at("n").get<int>(),
                                                       doc.at("k").get<int>(), cap);
        BuiltModel out;
        out.type = type;
        out.space = model.space;
        out.rep = model.rep;
        out.chain = model.chain;
        out.info["n_generators"] = model.generator_elements.size();
        out.info["rate"] = model.rate;
        out.info["claimed_rate"] = model.claimed_rate;
        out.info["generator_count_matches_claim"] = model.generator_count_matches_claim;
        out.info["generates_full_group"] = model.generates_full_group;
        out.cayley = std::move(model);
        return out;
    }
    if (type == "chain") {
        ChainDocument parsed = chain_from_json(doc);
        BuiltModel out;
        out.type = type;
        out.space = parsed.space;
        out.rep = parsed.rep;
        out.chain = chain_from_mapping(parsed.space, parsed.rep, parsed.pi_weights);
        return out;
    }
    throw ParseError("unknown model type: " + type);
}

} // namespace curvlab
